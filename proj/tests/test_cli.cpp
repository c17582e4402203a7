#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "thmm/cli.hpp"
#include "thmm/thmm.hpp"

using namespace thmm;
using io::json;
namespace fs = std::filesystem;

namespace {

std::string sample(const std::string& name) {
  const char* dir = std::getenv("THMM_SAMPLES");
  return (fs::path(dir ? dir : "samples") / name).string();
}

struct Result {
  int code;
  std::string out;
  std::string err;
  json parsed() const { return json::parse(out); }
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "thmm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("thmm_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& text = "") const {
    const auto p = path_ / name;
    if (!text.empty()) std::ofstream(p) << text;
    return p.string();
  }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

double re(const json& entry) { return entry[0].get<double>(); }

}  // namespace

TEST(Analyze, LebesgueReport) {
  const auto r = run({"analyze", "--input", sample("lebesgue_m3.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.parsed();
  EXPECT_EQ(j["classification"]["status"], "PositiveDefinite");
  const json& mh = j["dsm_second"]["mhat"];
  ASSERT_EQ(mh.size(), 2u);
  EXPECT_NEAR(re(mh[0][0][0]), 2.0, 1e-12);
  EXPECT_NEAR(re(mh[1][0][0]), 4.0, 1e-11);
  const json& lh = j["dsm_second"]["lhat"];
  ASSERT_EQ(lh.size(), 2u);
  EXPECT_EQ(j["dsm_second"]["lhat_first_index"], -1);
  EXPECT_NEAR(re(lh[0][0][0]), 1.0, 0.0);
  EXPECT_NEAR(re(lh[1][0][0]), 1.5, 1e-12);
  EXPECT_LE(j["dsm_second"]["route_residual"].get<double>(), 1e-10);
  EXPECT_LE(j["identities"]["products"]["max_residual"].get<double>(), 1e-9);
  EXPECT_TRUE(j["identities"]["products"]["informational"].contains("chain_p2_at_a_short_sum"));
  EXPECT_TRUE(j["schur"].contains("K2"));
}

TEST(Analyze, EmptyMomentsIsInputError) {
  TempDir tmp;
  const auto f = tmp.file("empty.json", R"({"q": 1, "a": 0, "b": 1, "moments": []})");
  const auto r = run({"analyze", "--input", f});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("empty"), std::string::npos);
}

TEST(Analyze, DegenerateIsMathErrorWithReport) {
  const auto r = run({"analyze", "--input", sample("point_mass_m2.json")});
  EXPECT_EQ(r.code, 3);
  const json j = r.parsed();
  EXPECT_EQ(j["classification"]["status"], "Degenerate");
  EXPECT_EQ(j["classification"]["matrix"], "H1");
  EXPECT_NEAR(j["classification"]["witness"].get<double>(), 0.0, 1e-14);
}

TEST(Analyze, BadInputs) {
  TempDir tmp;
  EXPECT_EQ(run({"analyze", "--input", tmp.file("missing.json")}).code, 2);
  EXPECT_EQ(run({"analyze", "--input", tmp.file("broken.json", "{not json")}).code, 2);
  EXPECT_EQ(run({"analyze", "--input", tmp.file("size.json", R"({"q": 2, "a": 0, "b": 1, "moments": [1]})")}).code, 2);
  EXPECT_EQ(run({"analyze", "--input", tmp.file("ab.json", R"({"a": 1, "b": 0, "moments": [1]})")}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"analyze"}).code, 2);
  EXPECT_EQ(run({"factorize", "--input", sample("lebesgue_m3.json"), "--z", "1+i"}).code, 2);
}

TEST(Factorize, OddSecondRouteAtMinusOne) {
  const auto r = run({"factorize", "--input", sample("lebesgue_m3.json"), "--z=-1", "--z", "2+1i", "--parity", "odd",
                      "--route", "second"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.parsed();
  ASSERT_EQ(j["results"].size(), 2u);
  const json& first = j["results"][0];
  EXPECT_EQ(first["parity"], "odd");
  EXPECT_EQ(first["route"], "second");
  EXPECT_LE(first["residual_vs_direct"].get<double>(), 1e-10);
  EXPECT_NEAR(re(first["U"][0][0]), 25.0, 1e-10);
  EXPECT_NEAR(re(first["U"][1][1]), 13.0, 1e-10);
  EXPECT_EQ(j["results"][1]["z"][1].get<double>(), 1.0);
}

TEST(Factorize, PoleIsMathError) {
  const auto r = run({"factorize", "--input", sample("lebesgue_m3.json"), "--z", "1", "--parity", "odd"});
  EXPECT_EQ(r.code, 3);
}

TEST(Factorize, TinyToleranceIsRouteMismatch) {
  const auto r = run({"factorize", "--input", sample("lebesgue_m5.json"), "--z", "2+1i", "--z", "-3-2i", "--route",
                      "first", "--rtol", "1e-300"});
  EXPECT_EQ(r.code, 4);
  EXPECT_FALSE(r.out.empty());
}

TEST(Extremal, FriedrichsDeskValue) {
  const auto r = run({"extremal", "--input", sample("lebesgue_m2.json"), "--z=-1", "--which", "friedrichs"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.parsed();
  ASSERT_EQ(j["results"].size(), 1u);
  EXPECT_EQ(j["results"][0]["which"], "friedrichs");
  EXPECT_EQ(j["results"][0]["route"], "cf");
  EXPECT_NEAR(re(j["results"][0]["value"][0][0]), 11.0 / 16.0, 1e-12);
  EXPECT_LE(j["results"][0]["cross_residual"].get<double>(), 1e-8);
}

TEST(Extremal, BothByDefaultAndOnIntervalRejected) {
  const auto r = run({"extremal", "--input", sample("lebesgue_m3.json"), "--z", "0+1i"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.parsed()["results"].size(), 2u);
  EXPECT_EQ(run({"extremal", "--input", sample("lebesgue_m3.json"), "--z", "0.5"}).code, 3);
}

TEST(Recover, RoundTripThroughAnalyze) {
  TempDir tmp;
  const auto report = tmp.file("report.json");
  ASSERT_EQ(run({"analyze", "--input", sample("lebesgue_m5.json"), "--output", report}).code, 0);
  const auto r = run({"recover", "--input", report});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.parsed();
  EXPECT_EQ(j["classification"]["status"], "PositiveDefinite");
  ASSERT_EQ(j["moments"].size(), 6u);
  for (int k = 0; k <= 5; ++k) EXPECT_NEAR(re(j["moments"][static_cast<std::size_t>(k)][0][0]), 1.0 / (k + 1), 1e-9);
}

TEST(Recover, ParameterFile) {
  const auto r = run({"recover", "--input", sample("lebesgue_params.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.parsed();
  ASSERT_EQ(j["moments"].size(), 4u);
  EXPECT_NEAR(re(j["moments"][3][0][0]), 0.25, 1e-14);
}

TEST(Recover, NonPositiveParameterIsMathError) {
  TempDir tmp;
  const auto f = tmp.file("p.json", R"({"a": 0, "b": 1, "s0": 1, "mhat": [-2], "lhat": []})");
  EXPECT_EQ(run({"recover", "--input", f}).code, 3);
}

TEST(Gen, SingleAtom) {
  const auto r = run({"gen", "--input", sample("single_atom.json"), "--count", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.parsed();
  ASSERT_EQ(j["moments"].size(), 3u);
  EXPECT_EQ(re(j["moments"][0][0][0]), 1.0);
  EXPECT_EQ(re(j["moments"][1][0][0]), 0.5);
  EXPECT_EQ(re(j["moments"][2][0][0]), 0.25);
}

TEST(Gen, BlockMeasureThenAnalyze) {
  TempDir tmp;
  const auto out = tmp.file("moments.json");
  ASSERT_EQ(run({"gen", "--input", sample("two_atoms_q2.json"), "--count", "3", "-o", out}).code, 0);
  const auto r = run({"analyze", "--input", out});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.parsed()["q"], 2);
}

TEST(Gen, PointOutsideInterval) {
  const auto r = run({"gen", "--input", sample("two_atoms_q2.json"), "--count", "3", "--b", "0.5"});
  EXPECT_EQ(r.code, 2);
}

TEST(ScalarReport, LebesgueValues) {
  const auto r = run({"scalar-report", "--input", sample("lebesgue_m5.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.parsed();
  EXPECT_NEAR(j["mtilde"][1].get<double>(), 4.0, 1e-10);
  EXPECT_NEAR(j["ltilde"][0].get<double>(), 1.5, 1e-10);
  EXPECT_LE(j["residual_vs_matrix"].get<double>(), 1e-8);
}

TEST(ScalarReport, BlockDataRejected) {
  TempDir tmp;
  const auto out = tmp.file("m.json");
  ASSERT_EQ(run({"gen", "--input", sample("two_atoms_q2.json"), "--count", "3", "-o", out}).code, 0);
  EXPECT_EQ(run({"scalar-report", "--input", out}).code, 2);
}

TEST(Output, DeterministicSeventeenDigits) {
  const auto a = run({"analyze", "--input", sample("lebesgue_m5.json")});
  const auto b = run({"analyze", "--input", sample("lebesgue_m5.json")});
  EXPECT_EQ(a.out, b.out);
  TempDir tmp;
  const auto f = tmp.file("third.json", R"({"points": [0.3333333333333333], "weights": [1]})");
  const auto g = run({"gen", "--input", f, "--count", "1"});
  EXPECT_NE(g.out.find("[0.33333333333333331, 0]"), std::string::npos) << g.out;
  EXPECT_EQ(io::format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_number(2.0), "2");
}

TEST(ParseComplex, Grammar) {
  EXPECT_EQ(io::parse_complex("2+1i"), cplx(2.0, 1.0));
  EXPECT_EQ(io::parse_complex("-1"), cplx(-1.0, 0.0));
  EXPECT_EQ(io::parse_complex("0.5-2.5i"), cplx(0.5, -2.5));
  EXPECT_EQ(io::parse_complex("1e-3+1e2i"), cplx(1e-3, 100.0));
  EXPECT_THROW(io::parse_complex("i"), InputError);
  EXPECT_THROW(io::parse_complex("1+i"), InputError);
  EXPECT_THROW(io::parse_complex("1+2j"), InputError);
  EXPECT_THROW(io::parse_complex("nan"), InputError);
  EXPECT_THROW(io::parse_complex(""), InputError);
}
