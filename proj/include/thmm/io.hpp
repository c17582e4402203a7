#pragma once

#include "thmm/fractions.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace thmm::io {

using json = nlohmann::ordered_json;

inline json encode(cplx z) { return json::array({z.real(), z.imag()}); }

inline json encode(const Mat& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(encode(M(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json encode(const std::vector<Mat>& v) {
  json out = json::array();
  for (const auto& m : v) out.push_back(encode(m));
  return out;
}

inline json encode(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

inline cplx decode_scalar(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw InputError("matrix entry must be a number or an [re, im] pair");
}

inline Mat decode_matrix(const json& j) {
  if (j.is_number()) {
    Mat m(1, 1);
    m(0, 0) = j.get<double>();
    return m;
  }
  if (!j.is_array() || j.empty()) throw InputError("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw InputError("matrix rows must be non-empty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw InputError("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = decode_scalar(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

inline std::vector<Mat> decode_matrices(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<Mat> out;
  for (const auto& x : j) out.push_back(decode_matrix(x));
  return out;
}

inline double number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw InputError(std::string("missing numeric field '") + key + "'");
  return j[key].get<double>();
}

inline void check_q(const json& j, const std::vector<Mat>& ms) {
  if (!j.contains("q")) return;
  if (!j["q"].is_number_integer()) throw InputError("field 'q' must be an integer");
  const auto q = j["q"].get<long>();
  for (const auto& m : ms)
    if (m.rows() != q || m.cols() != q) throw InputError("matrix size does not match q");
}

inline MomentSequence moments_from_json(const json& j) {
  if (!j.is_object()) throw InputError("moment file must be a JSON object");
  if (!j.contains("moments")) throw InputError("missing field 'moments'");
  const auto ms = decode_matrices(j["moments"], "moments");
  if (ms.empty()) throw InputError("moments array is empty");
  check_q(j, ms);
  return MomentSequence(number(j, "a"), number(j, "b"), ms);
}

inline json moments_to_json(const MomentSequence& seq) {
  json j;
  j["q"] = seq.q();
  j["a"] = seq.a();
  j["b"] = seq.b();
  j["moments"] = encode(seq.moments());
  return j;
}

struct MeasureFile {
  DiscreteMeasure measure;
  std::optional<double> a;
  std::optional<double> b;
};

inline MeasureFile measure_from_json(const json& j) {
  if (!j.is_object() || !j.contains("points") || !j.contains("weights"))
    throw InputError("measure file needs 'points' and 'weights'");
  MeasureFile f;
  for (const auto& x : j["points"]) {
    if (!x.is_number()) throw InputError("points must be real numbers");
    f.measure.points.push_back(x.get<double>());
  }
  f.measure.weights = decode_matrices(j["weights"], "weights");
  check_q(j, f.measure.weights);
  if (j.contains("a")) f.a = number(j, "a");
  if (j.contains("b")) f.b = number(j, "b");
  return f;
}

struct ParamFile {
  double a = 0.0;
  double b = 1.0;
  Mat s0;
  std::vector<Mat> mhat;
  std::vector<Mat> lhat;
};

inline ParamFile params_from_json(const json& in) {
  const json& j = in.is_object() && in.contains("params") ? in["params"] : in;
  if (!j.is_object() || !j.contains("s0") || !j.contains("mhat") || !j.contains("lhat"))
    throw InputError("parameter file needs 's0', 'mhat' and 'lhat'");
  ParamFile p;
  p.a = number(j, "a");
  p.b = number(j, "b");
  p.s0 = decode_matrix(j["s0"]);
  p.mhat = decode_matrices(j["mhat"], "mhat");
  p.lhat = decode_matrices(j["lhat"], "lhat");
  std::vector<Mat> all{p.s0};
  all.insert(all.end(), p.mhat.begin(), p.mhat.end());
  all.insert(all.end(), p.lhat.begin(), p.lhat.end());
  check_q(j, all);
  return p;
}

inline json params_to_json(const MomentSequence& seq, const DsmSecond& d) {
  json j;
  j["q"] = seq.q();
  j["a"] = seq.a();
  j["b"] = seq.b();
  j["s0"] = encode(seq.s(0));
  j["mhat"] = encode(d.mhat);
  j["lhat"] = encode(std::vector<Mat>(d.lhat.begin() + 1, d.lhat.end()));
  return j;
}

// A+Bi, A-Bi or A
inline cplx parse_complex(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double re = std::strtod(begin, &end);
  if (end == begin) throw InputError("cannot parse complex value '" + text + "'");
  if (*end == '\0') {
    if (!std::isfinite(re)) throw InputError("complex value must be finite: '" + text + "'");
    return {re, 0.0};
  }
  if (*end != '+' && *end != '-') throw InputError("cannot parse complex value '" + text + "'");
  const char* im_begin = end;
  char* im_end = nullptr;
  const double im = std::strtod(im_begin, &im_end);
  if (im_end == im_begin || *im_end != 'i' || im_end[1] != '\0')
    throw InputError("cannot parse complex value '" + text + "'");
  if (!std::isfinite(re) || !std::isfinite(im)) throw InputError("complex value must be finite: '" + text + "'");
  return {re, im};
}

inline std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void write(std::ostringstream& os, const json& j, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * level), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) { os << "{}"; return; }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write(os, it.value(), indent, level + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) { os << "[]"; return; }
      bool flat = true;
      for (const auto& x : j) flat = flat && !x.is_object() && !(x.is_array() && !x.empty() && !x[0].is_number());
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write(os, j[i], indent, level + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write(os, j[i], indent, level + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float:
      os << format_number(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

// Deterministic text with 17 significant digits for every float.
inline std::string to_text(const json& j, int indent = 2) {
  std::ostringstream os;
  detail::write(os, j, indent, 0);
  os << "\n";
  return os.str();
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("cannot parse '" + path + "': " + e.what());
  }
}

}  // namespace thmm::io
