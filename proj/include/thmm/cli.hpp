#pragma once

#include "thmm/io.hpp"

#include <iostream>
#include <map>

#include "CLI11.hpp"

namespace thmm::cli {

using io::json;

enum ExitCode { kOk = 0, kInputError = 2, kMathError = 3, kRouteMismatch = 4 };

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  std::vector<std::string> z_text;
  std::vector<cplx> z;
  std::string parity = "auto";
  std::string route = "second";
  std::string which = "both";
  std::optional<double> rtol;
  int count = -1;
  std::optional<double> a;
  std::optional<double> b;
};

namespace detail {

inline Parity pick_parity(const RunConfig& cfg, const MomentSequence& seq) {
  if (cfg.parity == "even") return Parity::Even;
  if (cfg.parity == "odd") return Parity::Odd;
  return seq.m() % 2 == 0 ? Parity::Even : Parity::Odd;
}

inline Route pick_route(const std::string& r) {
  if (r == "direct") return Route::Direct;
  if (r == "first") return Route::FirstDsm;
  return Route::SecondDsm;
}

// max normative residual per check name, plus informational ones separately
inline json summarize(const IdentityReport& rep) {
  std::map<std::string, double> held;
  std::map<std::string, double> info;
  for (const auto& c : rep.checks) {
    auto& slot = c.normative ? held : info;
    slot[c.name] = std::max(slot[c.name], c.residual);
  }
  json out;
  json h = json::object();
  for (const auto& [k, v] : held) h[k] = v;
  json i = json::object();
  for (const auto& [k, v] : info) i[k] = v;
  out["max_residual"] = rep.max_residual();
  out["checks"] = h;
  out["informational"] = i;
  return out;
}

inline json classification_json(const Classification& c) {
  json j;
  j["status"] = definiteness_name(c.status);
  if (!c.positive_definite()) {
    j["matrix"] = c.matrix;
    j["index"] = c.index;
    j["witness"] = c.witness;
  }
  return j;
}

}  // namespace detail

inline json cmd_analyze(const RunConfig& cfg, int& code) {
  const MomentSequence seq = io::moments_from_json(io::read_json_file(cfg.input));
  json out;
  out["q"] = seq.q();
  out["a"] = seq.a();
  out["b"] = seq.b();
  out["m"] = seq.m();
  const Classification c = classify(seq);
  out["classification"] = detail::classification_json(c);
  if (!c.positive_definite()) {
    code = kMathError;
    return out;
  }
  const PolynomialFamily fam = build_family(seq);
  json schur;
  for (auto k : {HankelKind::H1, HankelKind::H2, HankelKind::K1, HankelKind::K2})
    schur[hankel_name(k)] = io::encode(fam.schur().hat[static_cast<std::size_t>(k)]);
  out["schur"] = schur;
  const DsmSecond second = compute_second(fam, cfg.rtol.value_or(1e-10));
  json s;
  s["rhat"] = io::encode(second.rhat);
  s["that"] = io::encode(second.that);
  s["lhat_first_index"] = -1;
  s["lhat"] = io::encode(second.lhat);
  s["mhat"] = io::encode(second.mhat);
  s["route_residual"] = second.max_route_residual;
  out["dsm_second"] = s;
  const DsmFirst first = compute_first(seq);
  json f;
  f["M"] = io::encode(first.M);
  f["L"] = io::encode(first.L);
  out["dsm_first"] = f;
  json ids;
  ids["family"] = detail::summarize(verify_family_identities(fam));
  ids["products"] = detail::summarize(product_identities(fam, second));
  out["identities"] = ids;
  out["params"] = io::params_to_json(seq, second);
  return out;
}

inline json cmd_factorize(const RunConfig& cfg, int& code) {
  const MomentSequence seq = io::moments_from_json(io::read_json_file(cfg.input));
  const PolynomialFamily fam = build_family(seq);
  const Parity parity = detail::pick_parity(cfg, seq);
  const Route route = detail::pick_route(cfg.route);
  const double rtol = cfg.rtol.value_or(1e-8);
  const DsmSecond second = route == Route::SecondDsm ? compute_second(fam) : DsmSecond{};
  const DsmFirst first = route == Route::FirstDsm ? compute_first(seq) : DsmFirst{};
  json results = json::array();
  for (cplx z : cfg.z) {
    const FactorizedResolvent fr = resolvent_factorized(fam, second, first, z, parity, route);
    const ResolventValue direct = resolvent_direct(fam, z, parity);
    const double res = rel_residual(fr.value.full, direct.full);
    json r;
    r["z"] = io::encode(z);
    r["parity"] = parity_name(parity);
    r["route"] = route_name(route);
    r["U"] = io::encode(fr.value.full);
    r["residual_vs_direct"] = res;
    r["fallback"] = fr.fallback;
    results.push_back(r);
    if (res > rtol) code = kRouteMismatch;
  }
  json out;
  out["results"] = results;
  return out;
}

inline json cmd_extremal(const RunConfig& cfg, int& code) {
  const MomentSequence seq = io::moments_from_json(io::read_json_file(cfg.input));
  const PolynomialFamily fam = build_family(seq);
  const Parity parity = detail::pick_parity(cfg, seq);
  const double rtol = cfg.rtol.value_or(1e-8);
  std::vector<Which> which;
  if (cfg.which != "friedrichs") which.push_back(Which::Krein);
  if (cfg.which != "krein") which.push_back(Which::Friedrichs);
  json results = json::array();
  for (cplx z : cfg.z) {
    for (Which w : which) {
      const CfResult r = extremal_cf(fam, z, parity, w, std::numeric_limits<double>::infinity());
      json e;
      e["z"] = io::encode(z);
      e["which"] = which_name(w);
      e["parity"] = parity_name(parity);
      e["value"] = io::encode(r.value);
      e["route"] = "cf";
      e["quotient"] = io::encode(r.quotient);
      e["cross_residual"] = r.cross_residual;
      e["depth"] = r.chain.depth();
      results.push_back(e);
      if (r.cross_residual > rtol) code = kRouteMismatch;
    }
  }
  json out;
  out["results"] = results;
  return out;
}

inline json cmd_recover(const RunConfig& cfg, int& code) {
  const io::ParamFile p = io::params_from_json(io::read_json_file(cfg.input));
  const MomentSequence seq = recover_moments(p.s0, p.mhat, p.lhat, p.a, p.b);
  json out = io::moments_to_json(seq);
  const Classification c = classify(seq);
  out["classification"] = detail::classification_json(c);
  if (!c.positive_definite()) code = kMathError;
  return out;
}

inline json cmd_gen(const RunConfig& cfg, int& /*code*/) {
  const io::MeasureFile f = io::measure_from_json(io::read_json_file(cfg.input));
  if (cfg.count < 0) throw InputError("gen needs --count");
  const double a = cfg.a ? *cfg.a : f.a.value_or(0.0);
  const double b = cfg.b ? *cfg.b : f.b.value_or(1.0);
  return io::moments_to_json(moments_from_discrete_measure(f.measure, cfg.count, a, b));
}

inline json cmd_scalar(const RunConfig& cfg, int& code) {
  const MomentSequence seq = io::moments_from_json(io::read_json_file(cfg.input));
  const Classification c = classify(seq);
  if (!c.positive_definite()) {
    code = kMathError;
    json out;
    out["classification"] = detail::classification_json(c);
    return out;
  }
  const ScalarParams sp = scalar_determinant_params(seq);
  const DsmSecond d = second_by_quadratic_forms(seq);
  std::vector<double> mm;
  std::vector<double> ll;
  for (const auto& x : d.mhat) mm.push_back(x(0, 0).real());
  for (int j = 0; j < d.l_count(); ++j) ll.push_back(d.l(j)(0, 0).real());
  json out;
  out["mtilde"] = io::encode(sp.mt);
  out["ltilde"] = io::encode(sp.lt);
  out["mhat"] = io::encode(mm);
  out["lhat"] = io::encode(ll);
  out["residual_vs_matrix"] = sp.residual_vs_matrix;
  if (sp.residual_vs_matrix > cfg.rtol.value_or(1e-8)) code = kRouteMismatch;
  return out;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Truncated Hausdorff matrix moment problem toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  double rtol = 0.0;

  auto common = [&](CLI::App* sub, bool needs_z) {
    sub->add_option("--input,-i", cfg.input, "input JSON file")->required();
    sub->add_option("--output,-o", cfg.output, "output file (default stdout)");
    sub->add_option("--rtol", rtol, "tolerance override")->check(CLI::PositiveNumber);
    if (needs_z) {
      sub->add_option("--z", cfg.z_text, "evaluation point, A+Bi / A-Bi / A (repeatable)")->required()->allow_extra_args(false);
      sub->add_option("--parity", cfg.parity)->check(CLI::IsMember({"even", "odd", "auto"}));
    }
  };
  auto* analyze = app.add_subcommand("analyze", "classify, Schur complements, parameters, identity summaries");
  common(analyze, false);
  auto* factorize = app.add_subcommand("factorize", "resolvent matrix by a chosen route");
  common(factorize, true);
  factorize->add_option("--route", cfg.route)->check(CLI::IsMember({"direct", "second", "first"}));
  auto* extremal = app.add_subcommand("extremal", "extremal solutions by continued fractions");
  common(extremal, true);
  extremal->add_option("--which", cfg.which)->check(CLI::IsMember({"krein", "friedrichs", "both"}));
  auto* recover = app.add_subcommand("recover", "moments from a parameter file");
  common(recover, false);
  auto* gen = app.add_subcommand("gen", "moments of a discrete measure");
  common(gen, false);
  gen->add_option("--count", cfg.count, "highest moment index")->required()->check(CLI::NonNegativeNumber);
  gen->add_option("--a", cfg.a, "left endpoint");
  gen->add_option("--b", cfg.b, "right endpoint");
  auto* scalar = app.add_subcommand("scalar-report", "determinant formulas for q = 1");
  common(scalar, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  if (rtol > 0.0) cfg.rtol = rtol;

  int code = kOk;
  json result;
  try {
    for (const auto& t : cfg.z_text) cfg.z.push_back(io::parse_complex(t));
    if (cfg.command == "analyze") result = cmd_analyze(cfg, code);
    else if (cfg.command == "factorize") result = cmd_factorize(cfg, code);
    else if (cfg.command == "extremal") result = cmd_extremal(cfg, code);
    else if (cfg.command == "recover") result = cmd_recover(cfg, code);
    else if (cfg.command == "gen") result = cmd_gen(cfg, code);
    else result = cmd_scalar(cfg, code);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const RouteMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kRouteMismatch;
  } catch (const MathError& e) {
    err << "error: " << e.what() << "\n";
    return kMathError;
  }

  const std::string text = io::to_text(result);
  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.output);
    if (!f) {
      err << "error: cannot write '" << cfg.output << "'\n";
      return kInputError;
    }
    f << text;
  }
  return code;
}

}  // namespace thmm::cli
