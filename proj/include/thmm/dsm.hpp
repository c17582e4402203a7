#pragma once

#include "thmm/polynomials.hpp"

namespace thmm {

// Second-type parameters. lhat[0] holds l_{-1} = s_0, so l_j is lhat[j + 1];
// use l(j) for the shifted indexing.
struct DsmSecond {
  std::vector<Mat> rhat;
  std::vector<Mat> that;
  std::vector<Mat> lhat;
  std::vector<Mat> mhat;
  double max_route_residual = 0.0;

  const Mat& l(int j) const { return lhat.at(static_cast<std::size_t>(j + 1)); }
  int l_count() const { return static_cast<int>(lhat.size()) - 1; }
  int m_count() const { return static_cast<int>(mhat.size()); }
};

struct DsmFirst {
  std::vector<Mat> M;
  std::vector<Mat> L;
};

namespace detail {

inline Mat hermitian(const Mat& x) { return (x + x.adjoint()) / 2.0; }

// w* R*(a) A^{-1} R(a) w
inline Mat endpoint_form(const StructuralVectors& vec, const Mat& A, const std::string& name, int j,
                         const Mat& w, double a) {
  const PdFactor f = PdFactor::of(A, name, j);
  const Mat rw = vec.R(j, a) * w;
  return hermitian(f.form(rw, rw));
}

}  // namespace detail

// Quadratic-form route only.
inline DsmSecond second_by_quadratic_forms(const MomentSequence& seq) {
  const StructuralVectors vec(seq);
  const double a = seq.a();
  const int m = seq.m();
  DsmSecond d;
  auto qf = [&](int j) -> Mat {
    if (j < 0) return Mat::Zero(seq.q(), seq.q());
    const Mat w = vec.u2(j) + a * vec.v(j) * seq.s(0);
    return detail::endpoint_form(vec, block_hankel(seq, HankelKind::H2, j), "H2", j, w, a);
  };
  std::vector<Mat> qfs;
  for (int j = 0; 2 * j + 2 <= m; ++j) qfs.push_back(qf(j));
  auto qf_at = [&](int j) -> Mat {
    return j < 0 ? Mat::Zero(seq.q(), seq.q()) : qfs[static_cast<std::size_t>(j)];
  };

  d.lhat.push_back(seq.s(0));
  for (int j = 0; 2 * j + 2 <= m; ++j) d.lhat.push_back(qf_at(j) - qf_at(j - 1));
  for (int j = 0; 2 * j <= m; ++j) d.rhat.push_back(seq.s(0) + qf_at(j - 1));
  for (int j = 0; 2 * j + 1 <= m; ++j) {
    const Mat v = vec.v(j);
    d.that.push_back(detail::endpoint_form(vec, block_hankel(seq, HankelKind::K1, j), "K1", j, v, a));
    d.mhat.push_back(j == 0 ? d.that[0] : Mat(d.that[static_cast<std::size_t>(j)] - d.that[static_cast<std::size_t>(j) - 1]));
  }
  return d;
}

// Polynomial route: values at a and Schur complements.
inline DsmSecond second_by_polynomials(const PolynomialFamily& fam) {
  using K = PolyKind;
  const auto& sc = fam.schur();
  const int m = fam.sequence().m();
  DsmSecond d;
  d.lhat.push_back(fam.sequence().s(0));
  for (int j = 0; 2 * j + 2 <= m; ++j) {
    const Mat& Q = fam.at_a(K::Q2, j);
    const PdFactor f = PdFactor::of(sc.get(HankelKind::H2, j), "H2 Schur complement", j);
    d.lhat.push_back(detail::hermitian(Q.adjoint() * f.solve(Q)));
  }
  for (int j = 0; 2 * j <= m; ++j)
    d.rhat.push_back(fam.at_a(K::G1, j).partialPivLu().solve(fam.at_a(K::T1, j)));
  for (int j = 0; 2 * j + 1 <= m; ++j) {
    const Mat& G = fam.at_a(K::G1, j);
    const PdFactor f = PdFactor::of(sc.get(HankelKind::K1, j), "K1 Schur complement", j);
    d.mhat.push_back(detail::hermitian(G.adjoint() * f.solve(G)));
    d.that.push_back(fam.at_a(K::Q2, j).partialPivLu().solve(fam.at_a(K::P2, j)));
  }
  return d;
}

inline DsmSecond compute_second(const PolynomialFamily& fam, double rtol = 1e-10) {
  DsmSecond d = second_by_quadratic_forms(fam.sequence());
  const DsmSecond p = second_by_polynomials(fam);
  double worst = 0.0;
  auto compare = [&](const std::vector<Mat>& x, const std::vector<Mat>& y, const char* name, int offset) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double r = rel_residual(x[j], y[j]);
      worst = std::max(worst, r);
      if (r > rtol) throw RouteMismatch(name, static_cast<int>(j) + offset, r);
    }
  };
  compare(d.lhat, p.lhat, "lhat", -1);
  compare(d.rhat, p.rhat, "rhat", 0);
  compare(d.that, p.that, "that", 0);
  compare(d.mhat, p.mhat, "mhat", 0);
  d.max_route_residual = worst;
  return d;
}

inline DsmSecond compute_second(const MomentSequence& seq, double rtol = 1e-10) {
  return compute_second(build_family(seq), rtol);
}

inline DsmFirst compute_first(const MomentSequence& seq) {
  const StructuralVectors vec(seq);
  const double a = seq.a();
  const int m = seq.m();
  const int q = seq.q();
  DsmFirst d;
  Mat prev = Mat::Zero(q, q);
  for (int j = 0; 2 * j <= m; ++j) {
    if (j == 0) {
      const PdFactor f = PdFactor::of(seq.s(0), "H1", 0);
      prev = detail::hermitian(f.inverse());
      d.M.push_back(prev);
      continue;
    }
    const Mat h = detail::endpoint_form(vec, block_hankel(seq, HankelKind::H1, j), "H1", j, vec.v(j), a);
    d.M.push_back(h - prev);
    prev = h;
  }
  prev = Mat::Zero(q, q);
  for (int j = 0; 2 * j + 1 <= m; ++j) {
    const Mat g = detail::endpoint_form(vec, block_hankel(seq, HankelKind::K2, j), "K2", j, vec.ut2(j), a);
    d.L.push_back(g - prev);
    prev = g;
  }
  return d;
}

inline IdentityReport product_identities(const PolynomialFamily& fam, const DsmSecond& dsm) {
  using K = PolyKind;
  using H = HankelKind;
  IdentityReport rep;
  const auto& seq = fam.sequence();
  const auto& sc = fam.schur();
  const int q = seq.q();
  const Mat I = eye(q);
  const int nm = dsm.m_count();
  const int nl = dsm.l_count();
  const auto& mh = dsm.mhat;
  auto l = [&](int j) -> const Mat& { return dsm.l(j); };
  auto sign = [](int j) { return j % 2 == 0 ? 1.0 : -1.0; };

  // alternating products m_0^{-1} l_0^{-1} ... m_{j-1}^{-1} l_{j-1}^{-1}
  std::vector<Mat> chain{I};
  for (int k = 0; k < std::min(nm, nl); ++k) chain.push_back(chain.back() * inv(mh[static_cast<std::size_t>(k)]) * inv(l(k)));

  for (int j = 0; j < nm; ++j) {
    if (static_cast<std::size_t>(j) >= chain.size()) break;
    const Mat& C = chain[static_cast<std::size_t>(j)];
    const Mat& mj = mh[static_cast<std::size_t>(j)];
    const Mat q2 = sign(j) * C * inv(mj);
    rep.add("chain_q2_at_a", j, rel_residual(fam.at_a(K::Q2, j), q2));
    rep.add("chain_gamma1_at_a", j, rel_residual(fam.at_a(K::G1, j), sign(j) * C));
    Mat lsum = seq.s(0);
    for (int k = 0; k < j; ++k) lsum += l(k);
    rep.add("chain_theta1_at_a", j, rel_residual(fam.at_a(K::T1, j), sign(j) * C * lsum));
    Mat msum = Mat::Zero(q, q);
    for (int k = 0; k < j; ++k) msum += mh[static_cast<std::size_t>(k)];
    rep.add("chain_p2_at_a", j, rel_residual(fam.at_a(K::P2, j), q2 * (msum + mj)));
    if (j >= 1) rep.add("chain_p2_at_a_short_sum", j, rel_residual(fam.at_a(K::P2, j), q2 * msum), false);

    rep.add("neighbor_q2_gamma1", j, rel_residual(fam.at_a(K::Q2, j), fam.at_a(K::G1, j) * inv(mj)));
    if (j >= 1)
      rep.add("neighbor_gamma1_q2", j, rel_residual(fam.at_a(K::G1, j), -fam.at_a(K::Q2, j - 1) * inv(l(j - 1))));
    rep.add("mhat_from_q2_gamma1", j,
            rel_residual(mj, fam.at_a(K::Q2, j).partialPivLu().solve(fam.at_a(K::G1, j))));
    if (j < nl && fam.has(K::G1, j + 1))
      rep.add("lhat_from_gamma1_q2", j,
              rel_residual(l(j), -fam.at_a(K::G1, j + 1).partialPivLu().solve(fam.at_a(K::Q2, j))));
  }

  // Schur complements from the parameters, and back.
  if (nm >= 1) rep.add("k1hat0_from_mhat0", 0, rel_residual(sc.get(H::K1, 0), inv(mh[0])));
  {
    Mat left = I;
    Mat right = I;
    for (int j = 0; j < nm; ++j) {
      const Mat& mj = mh[static_cast<std::size_t>(j)];
      rep.add("k1hat_from_params", j, rel_residual(sc.get(H::K1, j), left * inv(mj) * right));
      if (j < nl) {
        const Mat X = inv(mj * l(j));
        rep.add("h2hat_from_params", j, rel_residual(sc.get(H::H2, j), left * X.adjoint() * l(j) * X * right));
        // printed variant with one product factor fewer on the right
        rep.add("h2hat_from_params_short", j, rel_residual(sc.get(H::H2, j), left * X.adjoint() * l(j) * right), false);
        rep.add("k1hat_from_params_long", j, rel_residual(sc.get(H::K1, j), left * X.adjoint() * inv(mj) * X * right), false);
        left = left * X.adjoint();
        right = X * right;
      }
    }
  }
  {
    Mat left = I;
    Mat right = I;
    Mat left2 = I;
    Mat right2 = I;
    for (int j = 0; j < nm; ++j) {
      const Mat& kh = sc.get(H::K1, j);
      rep.add("mhat_from_schur", j, rel_residual(mh[static_cast<std::size_t>(j)], left * inv(kh) * right));
      if (j < nl) {
        const Mat& hh = sc.get(H::H2, j);
        const Mat Y = hh.partialPivLu().solve(kh);
        left2 = left2 * Y.adjoint();
        right2 = Y * right2;
        rep.add("lhat_from_schur", j, rel_residual(l(j), left2 * hh * right2));
        const Mat X = hh * inv(kh);
        left = left * X.adjoint();
        right = X * right;
      }
    }
  }
  {
    // endpoint values as alternating Schur products
    Mat g = I;
    Mat qc = I;
    for (int j = 0; j < nm; ++j) {
      rep.add("gamma1_from_schur", j, rel_residual(fam.at_a(K::G1, j), sign(j) * g));
      rep.add("q2_from_schur", j, rel_residual(fam.at_a(K::Q2, j), sign(j) * sc.get(H::K1, j) * qc));
      if (j < nl) {
        g = sc.get(H::H2, j) * inv(sc.get(H::K1, j)) * g;
        qc = sc.get(H::H2, j).partialPivLu().solve(sc.get(H::K1, j)) * qc;
      }
    }
    Mat p = I;
    Mat t = I;
    for (int j = 0; j < sc.count(H::H1); ++j) {
      if (fam.has(K::P1, j)) rep.add("p1_from_schur", j, rel_residual(fam.at_a(K::P1, j), sign(j) * p));
      rep.add("theta2_from_schur", j, rel_residual(fam.at_a(K::T2, j), -sign(j) * sc.get(H::H1, j) * t));
      if (j < sc.count(H::K2)) {
        p = sc.get(H::K2, j) * inv(sc.get(H::H1, j)) * p;
        t = sc.get(H::K2, j).partialPivLu().solve(sc.get(H::H1, j)) * t;
      }
    }
  }

  // first-type analogues
  const DsmFirst first = compute_first(seq);
  Mat c = I;
  for (int j = 0; j < static_cast<int>(first.M.size()); ++j) {
    const Mat& Mj = first.M[static_cast<std::size_t>(j)];
    rep.add("first_m_from_polys", j,
            rel_residual(Mj, -fam.at_a(K::T2, j).partialPivLu().solve(fam.at_a(K::P1, j))));
    if (fam.has(K::P1, j)) rep.add("first_chain_p1", j, rel_residual(fam.at_a(K::P1, j), sign(j) * c));
    rep.add("first_chain_theta2", j, rel_residual(fam.at_a(K::T2, j), -sign(j) * c * inv(Mj)));
    if (j < static_cast<int>(first.L.size())) {
      const Mat& Lj = first.L[static_cast<std::size_t>(j)];
      rep.add("first_l_from_polys", j,
              rel_residual(Lj, fam.at_a(K::P1, j + 1).partialPivLu().solve(fam.at_a(K::T2, j))));
      c = c * inv(Mj) * inv(Lj);
    }
  }
  return rep;
}

inline MomentSequence recover_moments(const Mat& s0, const std::vector<Mat>& mhat,
                                      const std::vector<Mat>& lhat, double a, double b) {
  if (!(a < b)) throw InvalidSequence("interval endpoints must satisfy a < b");
  if (!(lhat.size() == mhat.size() || lhat.size() + 1 == mhat.size()))
    throw InconsistentLengths("lhat must have as many entries as mhat or one fewer");
  const Eigen::Index q = s0.rows();
  auto check = [&](const Mat& x, const std::string& name) {
    if (x.rows() != q || x.cols() != q) throw InconsistentLengths(name + " has the wrong size");
    if ((x - x.adjoint()).norm() > 1e-12 * (1.0 + x.norm()) || !is_positive_definite(x))
      throw NonPositiveParameter(name);
  };
  check(s0, "s0");
  for (std::size_t j = 0; j < mhat.size(); ++j) check(mhat[j], "mhat[" + std::to_string(j) + "]");
  for (std::size_t j = 0; j < lhat.size(); ++j) check(lhat[j], "lhat[" + std::to_string(j) + "]");

  std::vector<Mat> s{s0};
  Mat left = eye(static_cast<int>(q));
  Mat right = eye(static_cast<int>(q));
  for (std::size_t j = 0; j < mhat.size(); ++j) {
    const int jj = static_cast<int>(j);
    const Mat k1hat = left * inv(mhat[j]) * right;
    if (j == 0) {
      s.push_back(b * s[0] - k1hat);
    } else {
      const MomentSequence part(a, b, s);
      const StructuralVectors vec(part);
      const Mat Y = vec.Yt1(jj);
      const PdFactor f = PdFactor::of(block_hankel(part, HankelKind::K1, jj - 1), "K1", jj - 1);
      s.push_back(b * s[2 * j] - (f.form(Y, Y) + k1hat));
    }
    if (j >= lhat.size()) break;
    const Mat X = inv(mhat[j] * lhat[j]);
    const Mat h2hat = left * X.adjoint() * lhat[j] * X * right;
    Mat corner = h2hat;
    if (j > 0) {
      const MomentSequence part(a, b, s);
      const StructuralVectors vec(part);
      const Mat Y = vec.Y2(jj);
      const PdFactor f = PdFactor::of(block_hankel(part, HankelKind::H2, jj - 1), "H2", jj - 1);
      corner += f.form(Y, Y);
    }
    s.push_back(-corner - a * b * s[2 * j] + (a + b) * s[2 * j + 1]);
    left = left * X.adjoint();
    right = X * right;
  }
  for (auto& x : s) x = detail::hermitian(x);
  return MomentSequence(a, b, std::move(s));
}

struct StieltjesReport {
  std::vector<double> b_values;
  // err_m[i][j] = |b m_j(0,b) - M_j(0)| at b_values[i]; err_l likewise for l_j / b - L_j
  std::vector<std::vector<double>> err_m;
  std::vector<std::vector<double>> err_l;
};

inline StieltjesReport stieltjes_limit_check(const MomentSequence& seq, const std::vector<double>& b_values) {
  if (seq.a() != 0.0) throw InvalidSequence("the limit check needs a = 0");
  const DsmFirst first = compute_first(seq);
  StieltjesReport rep;
  rep.b_values = b_values;
  for (double b : b_values) {
    const DsmSecond d = second_by_quadratic_forms(seq.with_interval(0.0, b));
    std::vector<double> em;
    std::vector<double> el;
    for (int j = 0; j < d.m_count() && j < static_cast<int>(first.M.size()); ++j)
      em.push_back((b * d.mhat[static_cast<std::size_t>(j)] - first.M[static_cast<std::size_t>(j)]).norm());
    for (int j = 0; j < d.l_count() && j < static_cast<int>(first.L.size()); ++j)
      el.push_back((d.l(j) / b - first.L[static_cast<std::size_t>(j)]).norm());
    rep.err_m.push_back(std::move(em));
    rep.err_l.push_back(std::move(el));
  }
  return rep;
}

struct ScalarParams {
  std::vector<double> mt;
  std::vector<double> lt;
  double residual_vs_matrix = 0.0;
};

inline ScalarParams scalar_determinant_params(const MomentSequence& seq) {
  if (seq.q() != 1) throw WrongMatrixSize("determinant formulas need q = 1");
  const double a = seq.a();
  const double b = seq.b();
  const int m = seq.m();
  auto s = [&](int i) { return seq.s(i)(0, 0).real(); };
  auto shat = [&](int i) { return seq.shat(i)(0, 0).real(); };
  auto det_of = [&](HankelKind k, int j) -> double {
    if (j < 0) return 1.0;
    return block_hankel(seq, k, j).determinant().real();
  };
  const StructuralVectors vec(seq);

  ScalarParams out;
  for (int j = 0; 2 * j + 1 <= m; ++j) {
    Eigen::MatrixXd D(j + 1, j + 1);
    for (int r = 0; r < j; ++r)
      for (int c = 0; c <= j; ++c) D(r, c) = b * s(r + c) - s(r + c + 1);
    double p = 1.0;
    for (int c = 0; c <= j; ++c, p *= a) D(j, c) = p;
    const double dd = D.determinant();
    out.mt.push_back(dd * dd / (det_of(HankelKind::K1, j) * det_of(HankelKind::K1, j - 1)));
  }
  for (int j = 0; 2 * j + 2 <= m; ++j) {
    Eigen::MatrixXd E(j + 1, j + 1);
    for (int r = 0; r < j; ++r)
      for (int c = 0; c <= j; ++c) E(r, c) = shat(r + c);
    const Mat u = vec.u2(j);
    std::vector<double> w;
    for (int l = 0; l <= j; ++l) w.push_back(u(l, 0).real() + (l == 0 ? a * s(0) : 0.0));
    for (int k = 0; k <= j; ++k) {
      double acc = 0.0;
      for (int l = 0; l <= k; ++l) acc += w[static_cast<std::size_t>(l)] * std::pow(a, k - l);
      E(j, k) = -acc;
    }
    const double de = E.determinant();
    out.lt.push_back(de * de / (det_of(HankelKind::H2, j) * det_of(HankelKind::H2, j - 1)));
  }
  const DsmSecond d = second_by_quadratic_forms(seq);
  double worst = 0.0;
  for (std::size_t j = 0; j < out.mt.size(); ++j)
    worst = std::max(worst, std::abs(out.mt[j] - d.mhat[j](0, 0).real()) / std::abs(d.mhat[j](0, 0).real()));
  for (std::size_t j = 0; j < out.lt.size(); ++j)
    worst = std::max(worst, std::abs(out.lt[j] - d.l(static_cast<int>(j))(0, 0).real()) /
                                std::abs(d.l(static_cast<int>(j))(0, 0).real()));
  out.residual_vs_matrix = worst;
  return out;
}

}  // namespace thmm
