#pragma once

#include "thmm/dsm.hpp"

namespace thmm {

enum class Parity { Even, Odd };
enum class Route { Direct, SecondDsm, FirstDsm };

inline const char* parity_name(Parity p) { return p == Parity::Even ? "even" : "odd"; }

inline const char* route_name(Route r) {
  switch (r) {
    case Route::Direct: return "direct";
    case Route::SecondDsm: return "second";
    case Route::FirstDsm: return "first";
  }
  return "?";
}

// n for the requested parity: even uses s_0..s_{2n}, odd uses s_0..s_{2n+1}.
inline int parity_order(int m, Parity p) {
  if (p == Parity::Even) return m / 2;
  if (m < 1) throw InsufficientMoments("odd parity needs at least s_0, s_1");
  return (m - 1) / 2;
}

struct ResolventValue {
  Mat full;
  Parity parity = Parity::Even;
  int n = 0;
  cplx z;

  Mat alpha() const { return top_left(full); }
  Mat beta() const { return top_right(full); }
  Mat gamma() const { return bottom_left(full); }
  Mat delta() const { return bottom_right(full); }
};

inline ResolventValue resolvent_direct(const PolynomialFamily& fam, cplx z, Parity parity) {
  using K = PolyKind;
  const double a = fam.a();
  const double b = fam.b();
  const int n = parity_order(fam.sequence().m(), parity);
  ResolventValue r{Mat(), parity, n, z};
  if (parity == Parity::Even) {
    const Mat t2 = inv_normalizer(fam.at_a(K::T2, n).adjoint(), "Theta2*(a)");
    const Mat g1 = inv_normalizer(fam.at_a(K::G1, n).adjoint(), "Gamma1*(a)");
    r.full = block2(adjoint_eval(fam.get(K::T2, n), z) * t2,
                    adjoint_eval(fam.get(K::T1, n), z) * g1 / (b - a),
                    (z - a) * adjoint_eval(fam.get(K::G2, n), z) * t2,
                    (b - z) / (b - a) * adjoint_eval(fam.get(K::G1, n), z) * g1);
  } else {
    const Mat q2 = inv_normalizer(fam.at_a(K::Q2, n).adjoint(), "Q2*(a)");
    const Mat p1 = inv_normalizer(fam.at_a(K::P1, n + 1).adjoint(), "P1*(a)");
    r.full = block2(adjoint_eval(fam.get(K::Q2, n), z) * q2,
                    -adjoint_eval(fam.get(K::Q1, n + 1), z) * p1,
                    -(z - a) * (b - z) * adjoint_eval(fam.get(K::P2, n), z) * q2,
                    adjoint_eval(fam.get(K::P1, n + 1), z) * p1);
  }
  return r;
}

inline ResolventValue resolvent_direct(const MomentSequence& seq, cplx z, Parity parity) {
  return resolvent_direct(build_family(seq), z, parity);
}

namespace detail {

// [[I - c u*Rz A^{-1} Ra v, c u*Rz A^{-1} Ra u], [-c v*Rz A^{-1} Ra v, I + c v*Rz A^{-1} Ra u]]
inline Mat aux_block(const StructuralVectors& vec, const PdFactor& f, int j, const Mat& u, cplx z,
                     double a) {
  const int q = vec.q();
  const Mat Rz = vec.R(j, std::conj(z));
  const Mat Ra = vec.R(j, a);
  const Mat v = vec.v(j);
  const Mat lu = Rz * u;
  const Mat lv = Rz * v;
  const Mat rv = f.solve(Ra * v);
  const Mat ru = f.solve(Ra * u);
  const cplx c = z - a;
  return block2(eye(q) - c * lu.adjoint() * rv, c * lu.adjoint() * ru, -c * lv.adjoint() * rv,
                eye(q) + c * lv.adjoint() * ru);
}

}  // namespace detail

struct AuxMatrices {
  std::optional<Mat> tilde_even;  // second auxiliary matrix of even order 2j
  std::optional<Mat> tilde_odd;   // second auxiliary matrix of odd order 2j+1
  std::optional<Mat> hat_even;    // transformed second auxiliary matrix of order 2j
  double hat_relation_residual = 0.0;
};

inline Mat aux_tilde_odd(const PolynomialFamily& fam, int j, cplx z) {
  const auto& vec = fam.vectors();
  const PdFactor f = PdFactor::of(fam.hankels().get(HankelKind::K1, j), "K1", j);
  return detail::aux_block(vec, f, j, vec.ut1(j), z, fam.a());
}

inline Mat aux_tilde_even(const PolynomialFamily& fam, int j, cplx z) {
  const auto& vec = fam.vectors();
  const PdFactor f = PdFactor::of(fam.hankels().get(HankelKind::H2, j), "H2", j);
  return detail::aux_block(vec, f, j, vec.u2(j), z, fam.a());
}

inline Mat aux_hat_even(const PolynomialFamily& fam, int j, cplx z) {
  const auto& vec = fam.vectors();
  const double a = fam.a();
  const int q = fam.q();
  const Mat& s0 = fam.sequence().s(0);
  const PdFactor f = PdFactor::of(fam.hankels().get(HankelKind::H2, j), "H2", j);
  const Mat Rz = vec.R(j, std::conj(z));
  const Mat Ra = vec.R(j, a);
  const Mat v = vec.v(j);
  const Mat u = vec.u2(j);
  // left row u* + z s_0 v*, right column u + a v s_0
  const Mat lrow = (Rz * (u + std::conj(z) * v * s0)).adjoint();
  const Mat rcol = Ra * (u + a * v * s0);
  const Mat lv = (Rz * v).adjoint();
  const Mat rv = f.solve(Ra * v);
  const Mat rr = f.solve(rcol);
  const cplx c = z - a;
  return block2(eye(q) - c * lrow * rv, c * (s0 + lrow * rr), -c * lv * rv, eye(q) + c * lv * rr);
}

inline AuxMatrices aux_matrices(const PolynomialFamily& fam, int j, cplx z, double rtol = 1e-12) {
  AuxMatrices out;
  const auto& hs = fam.hankels();
  if (j < hs.count(HankelKind::K1)) out.tilde_odd = aux_tilde_odd(fam, j, z);
  if (j < hs.count(HankelKind::H2)) {
    out.tilde_even = aux_tilde_even(fam, j, z);
    out.hat_even = aux_hat_even(fam, j, z);
    const Mat& s0 = fam.sequence().s(0);
    const Mat rebuilt = upper_unit(z * s0) * *out.tilde_even * upper_unit(-fam.a() * s0);
    out.hat_relation_residual = rel_residual(*out.hat_even, rebuilt);
    if (out.hat_relation_residual > rtol) throw RouteMismatch("hat auxiliary", j, out.hat_relation_residual);
  }
  if (!out.tilde_odd && !out.tilde_even)
    throw InsufficientMoments("auxiliary matrices of order " + std::to_string(j) + " need more moments");
  return out;
}

namespace detail {

// d^{(k)} - I = (z-a) U V for k >= 1, U of size 2q x q and V of size q x 2q
struct BpParts {
  Mat U;
  Mat V;
};

inline BpParts bp_parts(const PolynomialFamily& fam, int k) {
  using K = PolyKind;
  if (k % 2 == 0) {
    const int j = (k - 2) / 2;
    if (j >= fam.schur().count(HankelKind::H2)) throw OrderUnavailable("Blaschke-Potapov factor", k);
    const PdFactor f = PdFactor::of(fam.schur().get(HankelKind::H2, j), "H2 Schur complement", j);
    const Mat& P = fam.at_a(K::P2, j);
    const Mat& Q = fam.at_a(K::Q2, j);
    Mat U(2 * fam.q(), fam.q());
    U << Q.adjoint(), -P.adjoint();
    Mat PQ(fam.q(), 2 * fam.q());
    PQ << P, Q;
    return {U, f.solve(PQ)};
  }
  const int j = (k - 1) / 2;
  if (j >= fam.schur().count(HankelKind::K1)) throw OrderUnavailable("Blaschke-Potapov factor", k);
  const PdFactor f = PdFactor::of(fam.schur().get(HankelKind::K1, j), "K1 Schur complement", j);
  const Mat& G = fam.at_a(K::G1, j);
  const Mat& T = fam.at_a(K::T1, j);
  Mat U(2 * fam.q(), fam.q());
  U << T.adjoint(), G.adjoint();
  Mat GT(fam.q(), 2 * fam.q());
  GT << -G, T;
  return {U, f.solve(GT)};
}

}  // namespace detail

// Blaschke-Potapov factor d^{(k)} from polynomial values at a and Schur complements.
inline Mat bp_factor(const PolynomialFamily& fam, int k, cplx z) {
  const cplx c = z - fam.a();
  if (k < 0) throw OrderUnavailable("Blaschke-Potapov factor", k);
  if (k == 0) return upper_unit(c * fam.sequence().s(0));
  const auto parts = detail::bp_parts(fam, k);
  return Mat::Identity(2 * fam.q(), 2 * fam.q()) + c * parts.U * parts.V;
}

// det d^{(k)}(z) as det(I + (z-a) V U), which stays accurate when the factor has large entries.
inline cplx bp_determinant(const PolynomialFamily& fam, int k, cplx z) {
  if (k < 0) throw OrderUnavailable("Blaschke-Potapov factor", k);
  if (k == 0) return 1.0;
  const auto parts = detail::bp_parts(fam, k);
  return (eye(fam.q()) + (z - fam.a()) * parts.V * parts.U).determinant();
}

// The same factor as a similarity-conjugated unipotent triangular matrix.
inline Mat bp_split(const DsmSecond& dsm, int k, cplx z, double a) {
  const cplx c = z - a;
  if (k < 0) throw OrderUnavailable("Blaschke-Potapov factor", k);
  if (k == 0) return upper_unit(c * dsm.l(-1));
  if (k % 2 == 0) {
    const int j = (k - 2) / 2;
    if (j >= dsm.l_count() || j >= static_cast<int>(dsm.that.size()))
      throw OrderUnavailable("Blaschke-Potapov factor", k);
    const Mat& t = dsm.that[static_cast<std::size_t>(j)];
    return lower_unit(-t) * upper_unit(c * dsm.l(j)) * lower_unit(t);
  }
  const int j = (k - 1) / 2;
  if (j >= dsm.m_count()) throw OrderUnavailable("Blaschke-Potapov factor", k);
  const Mat& r = dsm.rhat[static_cast<std::size_t>(j)];
  return upper_unit(r) * lower_unit(-c * dsm.mhat[static_cast<std::size_t>(j)]) * upper_unit(-r);
}

enum class AuxKind { HatEven, TildeOdd };

struct AuxProduct {
  Mat recursion;
  Mat telescoped;
  Mat direct;
  double residual = 0.0;
};

inline AuxProduct aux_product(const PolynomialFamily& fam, const DsmSecond& dsm, int order, cplx z,
                              AuxKind kind, double rtol = 1e-10) {
  const double a = fam.a();
  const cplx c = z - a;
  AuxProduct out;
  if (kind == AuxKind::HatEven) {
    if (order < 0 || order % 2 != 0) throw OrderUnavailable("hat auxiliary product", order);
    const int j = order / 2;
    out.direct = aux_hat_even(fam, j, z);
    out.recursion = bp_factor(fam, 0, z) * bp_factor(fam, 2, z);
    for (int i = 1; i <= j; ++i) out.recursion = out.recursion * bp_factor(fam, 2 * i + 2, z);
    Mat p = Mat::Identity(2 * fam.q(), 2 * fam.q());
    for (int k = 0; k <= j; ++k) p = p * upper_unit(c * dsm.l(k - 1)) * lower_unit(-dsm.mhat[static_cast<std::size_t>(k)]);
    out.telescoped = p * upper_unit(c * dsm.l(j)) * lower_unit(dsm.that[static_cast<std::size_t>(j)]);
  } else {
    if (order < 1 || order % 2 != 1) throw OrderUnavailable("tilde auxiliary product", order);
    const int j = (order - 1) / 2;
    out.direct = aux_tilde_odd(fam, j, z);
    out.recursion = bp_factor(fam, 1, z);
    for (int i = 1; i <= j; ++i) out.recursion = out.recursion * bp_factor(fam, 2 * i + 1, z);
    Mat p = Mat::Identity(2 * fam.q(), 2 * fam.q());
    for (int k = 0; k <= j; ++k) p = p * upper_unit(dsm.l(k - 1)) * lower_unit(-c * dsm.mhat[static_cast<std::size_t>(k)]);
    out.telescoped = p * upper_unit(-dsm.rhat[static_cast<std::size_t>(j)]);
  }
  out.residual = std::max(rel_residual(out.recursion, out.direct), rel_residual(out.telescoped, out.direct));
  if (out.residual > rtol) throw RouteMismatch("auxiliary product", order, out.residual);
  return out;
}

struct Factor {
  std::string label;
  Mat value;
};

struct FactorChain {
  std::vector<Factor> factors;

  void push(std::string label, Mat value) { factors.push_back({std::move(label), std::move(value)}); }

  // left to right, in the order the factors were pushed
  Mat product() const {
    Mat p = factors.front().value;
    for (std::size_t i = 1; i < factors.size(); ++i) p = p * factors[i].value;
    return p;
  }
};

struct FactorizedResolvent {
  ResolventValue value;
  FactorChain chain;
  bool fallback = false;
};

namespace detail {

inline bool near(cplx z, double x, double a, double b) {
  return std::abs(z - x) <= 1e-14 * std::max({1.0, std::abs(a), std::abs(b)});
}

inline std::string idx(const char* name, int k) { return std::string(name) + "[" + std::to_string(k) + "]"; }

}  // namespace detail

inline FactorizedResolvent resolvent_factorized(const PolynomialFamily& fam, const DsmSecond& second,
                                                const DsmFirst& first, cplx z, Parity parity, Route route) {
  using K = PolyKind;
  const double a = fam.a();
  const double b = fam.b();
  const int q = fam.q();
  const int n = parity_order(fam.sequence().m(), parity);
  const cplx c = z - a;
  FactorizedResolvent out;
  if (route == Route::Direct) {
    out.value = resolvent_direct(fam, z, parity);
    out.chain.push("direct", out.value.full);
    return out;
  }
  FactorChain& ch = out.chain;
  if (route == Route::SecondDsm && parity == Parity::Even) {
    if (n == 0) {
      out.value = resolvent_direct(fam, z, parity);
      out.chain.push("direct", out.value.full);
      out.fallback = true;
      return out;
    }
    if (detail::near(z, a, a, b) || detail::near(z, b, a, b)) throw PoleAtZ("z must avoid a and b on this route");
    ch.push("diag(1/((b-z)(z-a)), 1)", diag2(1.0 / ((b - z) * c), 1.0, q));
    for (int k = 0; k < n; ++k) {
      ch.push("upper((z-a) " + detail::idx("lhat", k - 1) + ")", upper_unit(c * second.l(k - 1)));
      ch.push("lower(-" + detail::idx("mhat", k) + ")", lower_unit(-second.mhat[static_cast<std::size_t>(k)]));
    }
    ch.push("upper((z-a) " + detail::idx("lhat", n - 1) + ")", upper_unit(c * second.l(n - 1)));
    const Mat X = inv_normalizer(fam.at_a(K::Q2, n - 1), "Q2(a)") * fam.at_a(K::P2, n - 1) +
                  inv_normalizer(fam.at_a(K::T2, n), "Theta2(a)") * fam.at_a(K::G2, n) / (b - a);
    ch.push("lower(boundary)", lower_unit(X));
    ch.push("diag((b-a)(z-a), (b-z)/(b-a))", diag2((b - a) * c, (b - z) / (b - a), q));
  } else if (route == Route::SecondDsm) {
    if (detail::near(z, b, a, b)) throw PoleAtZ("z must avoid b on this route");
    ch.push("diag(1/(b-z), 1)", diag2(1.0 / (b - z), 1.0, q));
    for (int k = 0; k <= n; ++k) {
      ch.push("upper(" + detail::idx("lhat", k - 1) + ")", upper_unit(second.l(k - 1)));
      ch.push("lower(-(z-a) " + detail::idx("mhat", k) + ")", lower_unit(-c * second.mhat[static_cast<std::size_t>(k)]));
    }
    const Mat X = -inv_normalizer(fam.at_a(K::G1, n), "Gamma1(a)") * fam.at_a(K::T1, n) -
                  (b - a) * inv_normalizer(fam.at_a(K::P1, n + 1), "P1(a)") * fam.at_a(K::Q1, n + 1);
    ch.push("upper(boundary)", upper_unit(X));
    ch.push("diag(b-z, 1)", diag2(b - z, 1.0, q));
  } else if (parity == Parity::Even) {
    for (int k = 0; k < n; ++k) {
      ch.push("lower(-(z-a) " + detail::idx("M", k) + ")", lower_unit(-c * first.M[static_cast<std::size_t>(k)]));
      ch.push("upper(" + detail::idx("L", k) + ")", upper_unit(first.L[static_cast<std::size_t>(k)]));
    }
    ch.push("lower(-(z-a) " + detail::idx("M", n) + ")", lower_unit(-c * first.M[static_cast<std::size_t>(n)]));
    const Mat X = fam.at_a(K::Q1, n).adjoint() * inv_normalizer(fam.at_a(K::P1, n).adjoint(), "P1*(a)") +
                  fam.at_a(K::T1, n).adjoint() * inv_normalizer(fam.at_a(K::G1, n).adjoint(), "Gamma1*(a)") / (b - a);
    ch.push("upper(boundary)", upper_unit(X));
  } else {
    if (detail::near(z, a, a, b)) throw PoleAtZ("z must avoid a on this route");
    ch.push("diag(1/(z-a), 1)", diag2(1.0 / c, 1.0, q));
    for (int k = 0; k <= n; ++k) {
      ch.push("lower(-" + detail::idx("M", k) + ")", lower_unit(-first.M[static_cast<std::size_t>(k)]));
      ch.push("upper((z-a) " + detail::idx("L", k) + ")", upper_unit(c * first.L[static_cast<std::size_t>(k)]));
    }
    const Mat X = -fam.at_a(K::G2, n).adjoint() * inv_normalizer(fam.at_a(K::T2, n).adjoint(), "Theta2*(a)") -
                  (b - a) * fam.at_a(K::P2, n).adjoint() * inv_normalizer(fam.at_a(K::Q2, n).adjoint(), "Q2*(a)");
    ch.push("lower(boundary)", lower_unit(X));
    ch.push("diag(z-a, 1)", diag2(c, 1.0, q));
  }
  out.value = ResolventValue{ch.product(), parity, n, z};
  return out;
}

inline FactorizedResolvent resolvent_factorized(const PolynomialFamily& fam, cplx z, Parity parity, Route route) {
  const DsmSecond second = route == Route::SecondDsm ? compute_second(fam) : DsmSecond{};
  const DsmFirst first = route == Route::FirstDsm ? compute_first(fam.sequence()) : DsmFirst{};
  return resolvent_factorized(fam, second, first, z, parity, route);
}

inline FactorizedResolvent resolvent_factorized(const MomentSequence& seq, cplx z, Parity parity, Route route) {
  return resolvent_factorized(build_family(seq), z, parity, route);
}

// U^{(2n)} and U^{(2n+1)} rebuilt from the auxiliary matrices, compared with the direct value.
inline IdentityReport link_relations(const PolynomialFamily& fam, cplx z) {
  IdentityReport rep;
  const double a = fam.a();
  const double b = fam.b();
  const int q = fam.q();
  const int m = fam.sequence().m();
  const cplx c = z - a;
  const auto& vec = fam.vectors();
  const Mat& s0 = fam.sequence().s(0);

  const int ne = m / 2;
  if (ne >= 1) {
    const Mat direct = resolvent_direct(fam, z, Parity::Even).full;
    const PdFactor h1 = PdFactor::of(fam.hankels().get(HankelKind::H1, ne), "H1", ne);
    const Mat rv = vec.R(ne, a) * vec.v(ne);
    const Mat N2 = -h1.form(rv, rv) / (b - a);
    const Mat left = diag2(1.0 / (c * (b - z)), 1.0, q);
    const Mat right = diag2((b - a) * c, (b - z) / (b - a), q);
    const Mat hat = aux_hat_even(fam, ne - 1, z);
    rep.add("even_from_hat_aux", ne, rel_residual(left * hat * lower_unit(N2) * right, direct));
    const Mat A2 = upper_unit(-a * s0) * lower_unit(N2);
    rep.add("even_from_tilde_aux", ne,
            rel_residual(left * upper_unit(z * s0) * aux_tilde_even(fam, ne - 1, z) * A2 * right, direct));
    const Mat printed = diag2(c * (b - z), (b - z) / (b - a), q);
    rep.add("even_from_hat_aux_printed_scaling", ne, rel_residual(left * hat * lower_unit(N2) * printed, direct), false);
  }
  if (m >= 1) {
    const int no = (m - 1) / 2;
    const Mat direct = resolvent_direct(fam, z, Parity::Odd).full;
    const PdFactor k2 = PdFactor::of(fam.hankels().get(HankelKind::K2, no), "K2", no);
    const Mat ru = vec.R(no, a) * vec.ut2(no);
    const Mat B2 = (b - a) * k2.form(ru, ru);
    rep.add("odd_from_tilde_aux", no,
            rel_residual(diag2(1.0 / (b - z), 1.0, q) * aux_tilde_odd(fam, no, z) * upper_unit(B2) * diag2(b - z, 1.0, q),
                         direct));
  }
  return rep;
}

}  // namespace thmm
