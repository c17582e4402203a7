#pragma once

#include "thmm/resolvent.hpp"

namespace thmm {

namespace detail {

inline Mat checked_inverse(const Mat& D) {
  const double c = condition_number(D);
  if (!(c <= kConditionLimit)) throw SingularDenominator(c);
  return inv(D);
}

}  // namespace detail

// (A X + B Y)(C X + D Y)^{-1}
inline Mat mobius_apply(const Mat& U, const Mat& X, const Mat& Y) {
  const Mat num = top_left(U) * X + top_right(U) * Y;
  const Mat den = bottom_left(U) * X + bottom_right(U) * Y;
  return num * detail::checked_inverse(den);
}

inline Mat solution_transform(const ResolventValue& U, const Mat& P0, const Mat& Q0) {
  return mobius_apply(U.full, P0, Q0);
}

// Applies the transform factor by factor, rightmost first, carrying the pair (X, Y).
inline Mat mobius_apply_chain(const FactorChain& chain, const Mat& X, const Mat& Y) {
  Mat x = X;
  Mat y = Y;
  for (auto it = chain.factors.rbegin(); it != chain.factors.rend(); ++it) {
    const Mat nx = top_left(it->value) * x + top_right(it->value) * y;
    y = bottom_left(it->value) * x + bottom_right(it->value) * y;
    x = nx;
  }
  return x * detail::checked_inverse(y);
}

struct ExtremalSet {
  Mat sK;
  Mat sF;
  Parity parity = Parity::Even;
  cplx z;
  double krein_mobius_residual = 0.0;
  double friedrichs_mobius_residual = 0.0;
};

inline bool on_interval(cplx z, double a, double b) {
  return z.imag() == 0.0 && z.real() >= a && z.real() <= b;
}

inline ExtremalSet extremal_quotient(const PolynomialFamily& fam, cplx z, Parity parity, double rtol = 1e-8) {
  using K = PolyKind;
  const double a = fam.a();
  const double b = fam.b();
  if (on_interval(z, a, b)) throw PointOnInterval();
  const int n = parity_order(fam.sequence().m(), parity);
  ExtremalSet e;
  e.parity = parity;
  e.z = z;
  if (parity == Parity::Even) {
    e.sK = adjoint_eval(fam.get(K::T2, n), z) * detail::checked_inverse((z - a) * adjoint_eval(fam.get(K::G2, n), z));
    e.sF = adjoint_eval(fam.get(K::T1, n), z) * detail::checked_inverse((b - z) * adjoint_eval(fam.get(K::G1, n), z));
  } else {
    e.sK = -adjoint_eval(fam.get(K::Q2, n), z) *
           detail::checked_inverse((z - a) * (b - z) * adjoint_eval(fam.get(K::P2, n), z));
    e.sF = -adjoint_eval(fam.get(K::Q1, n + 1), z) * detail::checked_inverse(adjoint_eval(fam.get(K::P1, n + 1), z));
  }
  const ResolventValue U = resolvent_direct(fam, z, parity);
  const int q = fam.q();
  e.krein_mobius_residual = rel_residual(mobius_apply(U.full, eye(q), zeros(q, q)), e.sK);
  e.friedrichs_mobius_residual = rel_residual(mobius_apply(U.full, zeros(q, q), eye(q)), e.sF);
  if (e.krein_mobius_residual > rtol) throw RouteMismatch("krein quotient", n, e.krein_mobius_residual);
  if (e.friedrichs_mobius_residual > rtol) throw RouteMismatch("friedrichs quotient", n, e.friedrichs_mobius_residual);
  return e;
}

struct ContinuedFractionChain {
  Mat head;
  std::vector<Mat> levels;
  std::vector<std::string> tags;

  int depth() const { return static_cast<int>(levels.size()); }

  // head + inv(C_1 + inv(C_2 + ... + inv(C_d)))
  Mat evaluate() const {
    if (levels.empty()) return head;
    Mat acc = levels.back();
    for (int d = depth() - 1; d >= 1; --d) {
      const double c = condition_number(acc);
      if (!(c <= kConditionLimit)) throw SingularLevel(d + 1);
      acc = levels[static_cast<std::size_t>(d) - 1] + inv(acc);
    }
    const double c = condition_number(acc);
    if (!(c <= kConditionLimit)) throw SingularLevel(1);
    return head + inv(acc);
  }
};

enum class Which { Krein, Friedrichs };

inline const char* which_name(Which w) { return w == Which::Krein ? "krein" : "friedrichs"; }

// Chains of the four extremal solutions from prebuilt parameter lists.
inline ContinuedFractionChain extremal_chain(const Mat& s0, const DsmSecond& second, const DsmFirst& first, int n,
                                             cplx z, double a, double b, Parity parity, Which which) {
  using detail::idx;
  const auto q = s0.rows();
  const cplx ca = z - a;
  const cplx cb = b - z;
  ContinuedFractionChain ch;
  auto add = [&](Mat level, std::string tag) {
    ch.levels.push_back(std::move(level));
    ch.tags.push_back(std::move(tag));
  };
  const bool first_type = (parity == Parity::Even) == (which == Which::Krein);
  if (first_type) {
    if (n >= static_cast<int>(first.M.size())) throw OrderUnavailable("M", n);
    ch.head = Mat::Zero(q, q);
    for (int k = 0; k < n; ++k) {
      add(-ca * first.M[static_cast<std::size_t>(k)], "-(z-a) " + idx("M", k));
      add(first.L[static_cast<std::size_t>(k)], idx("L", k));
    }
    add(-ca * first.M[static_cast<std::size_t>(n)], "-(z-a) " + idx("M", n));
    if (parity == Parity::Odd) {
      if (n >= static_cast<int>(first.L.size())) throw OrderUnavailable("L", n);
      add(first.L[static_cast<std::size_t>(n)], idx("L", n));
    }
  } else {
    ch.head = s0 / cb;
    for (int k = 0; k < n; ++k) {
      add(-ca * cb * second.mhat[static_cast<std::size_t>(k)], "-(z-a)(b-z) " + idx("mhat", k));
      add(second.l(k) / cb, idx("lhat", k) + " / (b-z)");
    }
    if (parity == Parity::Odd) {
      if (n >= second.m_count()) throw OrderUnavailable("mhat", n);
      add(-ca * cb * second.mhat[static_cast<std::size_t>(n)], "-(z-a)(b-z) " + idx("mhat", n));
    }
  }
  return ch;
}

struct CfResult {
  Mat value;
  Mat quotient;
  ContinuedFractionChain chain;
  double cross_residual = 0.0;
};

inline CfResult extremal_cf(const PolynomialFamily& fam, cplx z, Parity parity, Which which, double rtol = 1e-8) {
  const auto& seq = fam.sequence();
  if (on_interval(z, seq.a(), seq.b())) throw PointOnInterval();
  const int n = parity_order(seq.m(), parity);
  const MomentSequence used = seq.truncated(parity == Parity::Even ? 2 * n : 2 * n + 1);
  const DsmSecond second = second_by_quadratic_forms(used);
  const DsmFirst first = compute_first(used);
  CfResult r;
  r.chain = extremal_chain(seq.s(0), second, first, n, z, seq.a(), seq.b(), parity, which);
  r.value = r.chain.evaluate();
  const ExtremalSet e = extremal_quotient(fam, z, parity, rtol);
  r.quotient = which == Which::Krein ? e.sK : e.sF;
  r.cross_residual = rel_residual(r.value, r.quotient);
  if (r.cross_residual > rtol) throw RouteMismatch(std::string(which_name(which)) + " continued fraction", n, r.cross_residual);
  return r;
}

}  // namespace thmm
