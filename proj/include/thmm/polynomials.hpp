#pragma once

#include "thmm/moments.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <optional>

namespace thmm {

enum class PolyKind { P1 = 0, P2, Q1, Q2, G1, G2, T1, T2 };

inline const char* poly_name(PolyKind k) {
  switch (k) {
    case PolyKind::P1: return "P1";
    case PolyKind::P2: return "P2";
    case PolyKind::Q1: return "Q1";
    case PolyKind::Q2: return "Q2";
    case PolyKind::G1: return "Gamma1";
    case PolyKind::G2: return "Gamma2";
    case PolyKind::T1: return "Theta1";
    case PolyKind::T2: return "Theta2";
  }
  return "?";
}

struct MatrixPoly {
  std::vector<Mat> coeffs;
  PolyKind kind = PolyKind::P1;
  int index = 0;

  int degree() const {
    for (int d = static_cast<int>(coeffs.size()) - 1; d > 0; --d)
      if (coeffs[static_cast<std::size_t>(d)].norm() != 0.0) return d;
    return 0;
  }
};

inline Mat eval(const MatrixPoly& p, cplx z) {
  Mat r = Mat::Zero(p.coeffs.front().rows(), p.coeffs.front().cols());
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) r = (r * z + *it).eval();
  return r;
}

// sum_k A_k^* z^k, the starred value at conj(z)
inline Mat adjoint_eval(const MatrixPoly& p, cplx z) {
  Mat r = Mat::Zero(p.coeffs.front().cols(), p.coeffs.front().rows());
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) r = (r * z + it->adjoint()).eval();
  return r;
}

namespace detail {

inline Mat row_block(const Mat& w, int l, int q) { return w.middleCols(l * q, q); }

// coefficients of w R_j(z) v_j
inline std::vector<Mat> times_unit(const Mat& w, int j, int q) {
  std::vector<Mat> c;
  for (int l = 0; l <= j; ++l) c.push_back(row_block(w, l, q));
  return c;
}

// coefficients of w R_j(z) u
inline std::vector<Mat> times_column(const Mat& w, const Mat& u, int j, int q) {
  std::vector<Mat> c;
  for (int p = 0; p <= j; ++p) {
    Mat acc = Mat::Zero(q, q);
    for (int l = p; l <= j; ++l) acc += row_block(w, l, q) * u.middleRows((l - p) * q, q);
    c.push_back(acc);
  }
  return c;
}

}  // namespace detail

class PolynomialFamily {
 public:
  explicit PolynomialFamily(const MomentSequence& seq)
      : seq_(seq), hankels_(build_hankels(seq)), schur_(schur_chain(hankels_)), vec_(seq) {
    const int m = seq_.m();
    max_[PolyKind::P1] = (m + 1) / 2;
    max_[PolyKind::Q1] = (m + 1) / 2;
    max_[PolyKind::P2] = m >= 1 ? (m - 1) / 2 : 0;
    max_[PolyKind::Q2] = m >= 1 ? (m - 1) / 2 : -1;
    for (auto k : {PolyKind::G1, PolyKind::G2, PolyKind::T1, PolyKind::T2}) max_[k] = m / 2;
    for (const auto& [kind, top] : max_)
      for (int j = 0; j <= top; ++j) build(kind, j);
  }

  const MomentSequence& sequence() const { return seq_; }
  const HankelSet& hankels() const { return hankels_; }
  const SchurChain& schur() const { return schur_; }
  const StructuralVectors& vectors() const { return vec_; }
  int q() const { return seq_.q(); }
  double a() const { return seq_.a(); }
  double b() const { return seq_.b(); }

  int max_order(PolyKind k) const { return max_.at(k); }
  bool has(PolyKind k, int j) const { return j >= 0 && j <= max_.at(k); }

  const MatrixPoly& get(PolyKind k, int j) const {
    auto it = polys_.find({k, j});
    if (it == polys_.end()) throw OrderUnavailable(poly_name(k), j);
    return it->second;
  }

  // Value at the left endpoint a.
  const Mat& at_a(PolyKind k, int j) const {
    auto it = at_a_.find({k, j});
    if (it == at_a_.end()) throw OrderUnavailable(poly_name(k), j);
    return it->second;
  }

 private:
  Mat row(HankelKind kind, const Mat& Y, int j) const {
    const int q = seq_.q();
    if (j == 0) return eye(q);
    const PdFactor f = PdFactor::of(hankels_.get(kind, j - 1), hankel_name(kind), j - 1);
    Mat w(q, (j + 1) * q);
    w.leftCols(j * q) = -f.solve(Y).adjoint();
    w.rightCols(q) = eye(q);
    return w;
  }

  void build(PolyKind kind, int j) {
    const int q = seq_.q();
    std::vector<Mat> c;
    switch (kind) {
      case PolyKind::P1:
        c = detail::times_unit(row(HankelKind::H1, j ? vec_.Y1(j) : Mat(), j), j, q);
        break;
      case PolyKind::Q1:
        if (j == 0) {
          c = {zeros(q, q)};
        } else {
          c = detail::times_column(row(HankelKind::H1, vec_.Y1(j), j), vec_.u1(j), j, q);
          for (auto& x : c) x = -x;
        }
        break;
      case PolyKind::P2:
        c = detail::times_unit(row(HankelKind::H2, j ? vec_.Y2(j) : Mat(), j), j, q);
        break;
      case PolyKind::Q2: {
        const Mat w = row(HankelKind::H2, j ? vec_.Y2(j) : Mat(), j);
        c = detail::times_column(w, vec_.u2(j), j, q);
        c.push_back(zeros(q, q));
        for (int l = 0; l <= j; ++l) c[static_cast<std::size_t>(l) + 1] += detail::row_block(w, l, q) * seq_.s(0);
        for (auto& x : c) x = -x;
        break;
      }
      case PolyKind::G1:
        c = detail::times_unit(row(HankelKind::K1, j ? vec_.Yt1(j) : Mat(), j), j, q);
        break;
      case PolyKind::G2:
        c = detail::times_unit(row(HankelKind::K2, j ? vec_.Yt2(j) : Mat(), j), j, q);
        break;
      case PolyKind::T1:
        c = detail::times_column(row(HankelKind::K1, j ? vec_.Yt1(j) : Mat(), j), vec_.ut1(j), j, q);
        break;
      case PolyKind::T2:
        c = detail::times_column(row(HankelKind::K2, j ? vec_.Yt2(j) : Mat(), j), vec_.ut2(j), j, q);
        break;
    }
    MatrixPoly p{std::move(c), kind, j};
    at_a_.emplace(std::make_pair(kind, j), eval(p, seq_.a()));
    polys_.emplace(std::make_pair(kind, j), std::move(p));
  }

  MomentSequence seq_;
  HankelSet hankels_;
  SchurChain schur_;
  StructuralVectors vec_;
  std::map<PolyKind, int> max_;
  std::map<std::pair<PolyKind, int>, MatrixPoly> polys_;
  std::map<std::pair<PolyKind, int>, Mat> at_a_;
};

inline PolynomialFamily build_family(const MomentSequence& seq) { return PolynomialFamily(seq); }

// Fixed sample points on a circle around [a,b].
inline std::vector<cplx> sample_points(double a, double b, int count = 10) {
  std::vector<cplx> z;
  const double c = (a + b) / 2.0;
  const double r = 1.5 * (b - a);
  for (int k = 0; k < count; ++k) {
    const double t = 2.0 * std::numbers::pi * k / count + 0.3;
    z.push_back(cplx(c + r * std::cos(t), r * std::sin(t)));
  }
  return z;
}

inline IdentityReport verify_family_identities(const PolynomialFamily& fam,
                                               const std::optional<DiscreteMeasure>& measure = std::nullopt) {
  using K = PolyKind;
  IdentityReport rep;
  const auto& seq = fam.sequence();
  const auto& sc = fam.schur();
  const auto& vec = fam.vectors();
  const auto& hs = fam.hankels();
  const double a = seq.a();
  const double b = seq.b();
  const int m = seq.m();
  const int top = m / 2;

  for (int j = 0; j <= top; ++j) {
    // Schur complements as products of polynomial values at a
    if (fam.has(K::P1, j) && fam.has(K::T2, j))
      rep.add("schur_h1_from_polys", j,
              rel_residual(sc.get(HankelKind::H1, j), -fam.at_a(K::P1, j) * fam.at_a(K::T2, j).adjoint()));
    if (j < sc.count(HankelKind::H2) && fam.has(K::Q2, j) && fam.has(K::G1, j + 1))
      rep.add("schur_h2_from_polys", j,
              rel_residual(sc.get(HankelKind::H2, j), -fam.at_a(K::Q2, j) * fam.at_a(K::G1, j + 1).adjoint()));
    if (j < sc.count(HankelKind::K1) && fam.has(K::Q2, j))
      rep.add("schur_k1_from_polys", j,
              rel_residual(sc.get(HankelKind::K1, j), fam.at_a(K::G1, j) * fam.at_a(K::Q2, j).adjoint()));
    if (j < sc.count(HankelKind::K2) && fam.has(K::P1, j + 1))
      rep.add("schur_k2_from_polys", j,
              rel_residual(sc.get(HankelKind::K2, j), fam.at_a(K::T2, j) * fam.at_a(K::P1, j + 1).adjoint()));
  }

  if (measure) {
    for (int j = 0; j <= top; ++j) {
      for (int k = 0; k <= top; ++k) {
        Mat acc = Mat::Zero(seq.q(), seq.q());
        for (std::size_t t = 0; t < measure->points.size(); ++t) {
          const double x = measure->points[t];
          acc += eval(fam.get(K::P1, j), x) * measure->weights[t] * eval(fam.get(K::P1, k), x).adjoint();
        }
        const Mat& hj = sc.get(HankelKind::H1, j);
        const Mat& hk = sc.get(HankelKind::H1, k);
        const Mat expect = j == k ? hj : Mat::Zero(seq.q(), seq.q());
        const double scale = std::sqrt(hj.norm() * hk.norm());
        rep.add("orthogonality", j, k, (acc - expect).norm() / scale);
      }
    }
  }

  const auto zs = sample_points(a, b);
  for (int j = 0; j <= top; ++j) {
    // Krein-type ratio against the H1 quadratic form
    const PdFactor h1 = PdFactor::of(hs.get(HankelKind::H1, j), "H1", j);
    const Mat t2a_adj_inv = inv(fam.at_a(K::T2, j).adjoint());
    double worst = 0.0;
    for (cplx z : zs) {
      const Mat lhs = adjoint_eval(fam.get(K::G2, j), z) * t2a_adj_inv;
      const Mat form = (vec.R(j, std::conj(z)) * vec.v(j)).adjoint() * h1.solve(vec.R(j, a) * vec.v(j));
      worst = std::max(worst, rel_residual(lhs, -form));
    }
    rep.add("ratio_first_kind", j, worst);

    if (j < hs.count(HankelKind::K2) && fam.has(K::Q1, j + 1)) {
      const PdFactor k2 = PdFactor::of(hs.get(HankelKind::K2, j), "K2", j);
      const Mat p1a_adj_inv = inv(fam.at_a(K::P1, j + 1).adjoint());
      const Mat u = vec.ut2(j);
      double w2 = 0.0;
      for (cplx z : zs) {
        const Mat lhs = adjoint_eval(fam.get(K::Q1, j + 1), z) * p1a_adj_inv;
        const Mat form = (vec.R(j, std::conj(z)) * u).adjoint() * k2.solve(vec.R(j, a) * u);
        w2 = std::max(w2, rel_residual(lhs, -form));
      }
      rep.add("ratio_second_kind", j, w2);
    }

    if (j < hs.count(HankelKind::K1) && fam.has(K::Q1, j + 1)) {
      const Mat t1 = (b - a) * fam.at_a(K::Q1, j + 1);
      const Mat t2 = fam.at_a(K::Q2, j);
      const Mat t3 = fam.at_a(K::P1, j + 1) * inv(fam.at_a(K::G1, j)) * fam.at_a(K::T1, j);
      const double scale = std::max({t1.norm(), t2.norm(), t3.norm()});
      rep.add("endpoint_sum_first", j, (t1 - t2 + t3).norm() / scale);
    }
    if (j >= 1 && fam.has(K::Q2, j - 1)) {
      const Mat t1 = fam.at_a(K::G1, j);
      const Mat t2 = fam.at_a(K::G2, j);
      const Mat t3 = (b - a) * fam.at_a(K::T2, j) * inv(fam.at_a(K::Q2, j - 1)) * fam.at_a(K::P2, j - 1);
      const double scale = std::max({t1.norm(), t2.norm(), t3.norm()});
      rep.add("endpoint_sum_second", j, (t1 - t2 - t3).norm() / scale);
    }
  }
  return rep;
}

}  // namespace thmm
