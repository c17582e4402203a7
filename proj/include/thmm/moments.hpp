#pragma once

#include "thmm/core.hpp"

#include <array>
#include <optional>

namespace thmm {

class MomentSequence {
 public:
  MomentSequence(double a, double b, std::vector<Mat> s, double tol_herm = 1e-12)
      : a_(a), b_(b), s_(std::move(s)) {
    if (!std::isfinite(a_) || !std::isfinite(b_) || !(a_ < b_))
      throw InvalidSequence("interval endpoints must satisfy a < b");
    if (s_.empty()) throw InvalidSequence("moment list is empty");
    q_ = static_cast<int>(s_[0].rows());
    if (q_ < 1) throw InvalidSequence("moment matrices must be at least 1x1");
    for (std::size_t j = 0; j < s_.size(); ++j) {
      Mat& x = s_[j];
      if (x.rows() != q_ || x.cols() != q_)
        throw InvalidSequence("moment " + std::to_string(j) + " has the wrong size");
      if (!x.allFinite()) throw InvalidSequence("moment " + std::to_string(j) + " is not finite");
      if ((x - x.adjoint()).norm() > tol_herm * (1.0 + x.norm()))
        throw InvalidSequence("moment " + std::to_string(j) + " is not Hermitian");
      Mat h = (x + x.adjoint()) / 2.0;
      x = h;
    }
  }

  int q() const { return q_; }
  int m() const { return static_cast<int>(s_.size()) - 1; }
  double a() const { return a_; }
  double b() const { return b_; }
  const Mat& s(int j) const { return s_.at(static_cast<std::size_t>(j)); }
  const std::vector<Mat>& moments() const { return s_; }

  // -ab s_j + (a+b) s_{j+1} - s_{j+2}
  Mat shat(int j) const { return -a_ * b_ * s(j) + (a_ + b_) * s(j + 1) - s(j + 2); }

  MomentSequence truncated(int m) const {
    if (m < 0 || m > this->m()) throw InsufficientMoments("cannot truncate to order " + std::to_string(m));
    return MomentSequence(a_, b_, std::vector<Mat>(s_.begin(), s_.begin() + m + 1));
  }

  MomentSequence with_interval(double a, double b) const { return MomentSequence(a, b, s_); }

 private:
  double a_;
  double b_;
  std::vector<Mat> s_;
  int q_ = 0;
};

enum class HankelKind { H1 = 0, H2 = 1, K1 = 2, K2 = 3 };

inline const char* hankel_name(HankelKind k) {
  switch (k) {
    case HankelKind::H1: return "H1";
    case HankelKind::H2: return "H2";
    case HankelKind::K1: return "K1";
    case HankelKind::K2: return "K2";
  }
  return "?";
}

// Largest order j whose Hankel matrix can be built from s_0..s_m, or -1.
inline int max_hankel_order(HankelKind k, int m) {
  switch (k) {
    case HankelKind::H1: return m / 2;
    case HankelKind::H2: return m >= 2 ? (m - 2) / 2 : -1;
    case HankelKind::K1:
    case HankelKind::K2: return m >= 1 ? (m - 1) / 2 : -1;
  }
  return -1;
}

inline Mat hankel_entry(const MomentSequence& seq, HankelKind k, int i) {
  switch (k) {
    case HankelKind::H1: return seq.s(i);
    case HankelKind::H2: return seq.shat(i);
    case HankelKind::K1: return seq.b() * seq.s(i) - seq.s(i + 1);
    case HankelKind::K2: return -seq.a() * seq.s(i) + seq.s(i + 1);
  }
  return {};
}

inline Mat block_hankel(const MomentSequence& seq, HankelKind k, int j) {
  if (j < 0 || j > max_hankel_order(k, seq.m()))
    throw InsufficientMoments(std::string(hankel_name(k)) + "[" + std::to_string(j) +
                              "] needs more moments");
  const int q = seq.q();
  Mat M(static_cast<Eigen::Index>((j + 1) * q), static_cast<Eigen::Index>((j + 1) * q));
  for (int l = 0; l <= j; ++l)
    for (int c = 0; c <= j; ++c) M.block(l * q, c * q, q, q) = hankel_entry(seq, k, l + c);
  return M;
}

struct HankelSet {
  int q = 0;
  std::array<std::vector<Mat>, 4> family;
  std::vector<Mat> shat;

  int count(HankelKind k) const { return static_cast<int>(family[static_cast<int>(k)].size()); }

  const Mat& get(HankelKind k, int j) const {
    const auto& f = family[static_cast<int>(k)];
    if (j < 0 || j >= static_cast<int>(f.size()))
      throw InsufficientMoments(std::string(hankel_name(k)) + "[" + std::to_string(j) +
                                "] needs more moments");
    return f[static_cast<std::size_t>(j)];
  }
};

inline HankelSet build_hankels(const MomentSequence& seq) {
  HankelSet hs;
  hs.q = seq.q();
  for (int k = 0; k < 4; ++k) {
    const auto kind = static_cast<HankelKind>(k);
    for (int j = 0; j <= max_hankel_order(kind, seq.m()); ++j)
      hs.family[static_cast<std::size_t>(k)].push_back(block_hankel(seq, kind, j));
  }
  for (int j = 0; j + 2 <= seq.m(); ++j) hs.shat.push_back(seq.shat(j));
  return hs;
}

inline Mat stack(const std::vector<Mat>& blocks) {
  Eigen::Index rows = 0;
  for (const auto& b : blocks) rows += b.rows();
  Mat out(rows, blocks.front().cols());
  Eigen::Index r = 0;
  for (const auto& b : blocks) {
    out.middleRows(r, b.rows()) = b;
    r += b.rows();
  }
  return out;
}

inline Mat unit_column(int j, int q) {
  Mat v = Mat::Zero((j + 1) * q, q);
  v.topRows(q) = eye(q);
  return v;
}

inline Mat block_shift(int j, int q) {
  Mat T = Mat::Zero((j + 1) * q, (j + 1) * q);
  for (int l = 1; l <= j; ++l) T.block(l * q, (l - 1) * q, q, q) = eye(q);
  return T;
}

// Lower block Toeplitz with z^{l-k} I in block (l, k).
inline Mat toeplitz_powers(int j, cplx z, int q) {
  Mat R = Mat::Zero((j + 1) * q, (j + 1) * q);
  for (int l = 0; l <= j; ++l) {
    cplx p = 1.0;
    for (int k = l; k >= 0; --k) {
      R.block(l * q, k * q, q, q) = p * eye(q);
      p *= z;
    }
  }
  return R;
}

class StructuralVectors {
 public:
  explicit StructuralVectors(const MomentSequence& seq) : seq_(seq) {}

  int q() const { return seq_.q(); }
  Mat v(int j) const { return unit_column(j, q()); }
  Mat T(int j) const { return block_shift(j, q()); }
  Mat R(int j, cplx z) const { return toeplitz_powers(j, z, q()); }
  // R_j^*(conj z) as a matrix: upper block Toeplitz with z^{k-l}.
  Mat R_adj(int j, cplx z) const { return toeplitz_powers(j, std::conj(z), q()).adjoint(); }

  Mat y(int from, int to) const {
    std::vector<Mat> b;
    for (int i = from; i <= to; ++i) b.push_back(seq_.s(i));
    return stack(b);
  }
  Mat yhat(int from, int to) const {
    std::vector<Mat> b;
    for (int i = from; i <= to; ++i) b.push_back(seq_.shat(i));
    return stack(b);
  }

  Mat ut1(int j) const {
    std::vector<Mat> b{seq_.s(0)};
    for (int k = 1; k <= j; ++k) b.push_back(seq_.s(k) - seq_.b() * seq_.s(k - 1));
    return stack(b);
  }
  Mat ut2(int j) const {
    std::vector<Mat> b{-seq_.s(0)};
    for (int k = 1; k <= j; ++k) b.push_back(-seq_.s(k) + seq_.a() * seq_.s(k - 1));
    return stack(b);
  }
  Mat u1(int j) const {
    std::vector<Mat> b{zeros(q(), q())};
    for (int k = 1; k <= j; ++k) b.push_back(-seq_.s(k - 1));
    return stack(b);
  }
  Mat u2(int j) const {
    std::vector<Mat> b{-(seq_.a() + seq_.b()) * seq_.s(0) + seq_.s(1)};
    for (int k = 1; k <= j; ++k) b.push_back(-seq_.shat(k - 1));
    return stack(b);
  }

  Mat Y1(int j) const { return y(j, 2 * j - 1); }
  Mat Y2(int j) const { return yhat(j, 2 * j - 1); }
  Mat Yt1(int j) const {
    std::vector<Mat> b;
    for (int i = j; i <= 2 * j - 1; ++i) b.push_back(seq_.b() * seq_.s(i) - seq_.s(i + 1));
    return stack(b);
  }
  Mat Yt2(int j) const {
    std::vector<Mat> b;
    for (int i = j; i <= 2 * j - 1; ++i) b.push_back(-seq_.a() * seq_.s(i) + seq_.s(i + 1));
    return stack(b);
  }

 private:
  MomentSequence seq_;
};

struct SchurChain {
  std::array<std::vector<Mat>, 4> hat;

  int count(HankelKind k) const { return static_cast<int>(hat[static_cast<int>(k)].size()); }
  const Mat& get(HankelKind k, int j) const {
    const auto& f = hat[static_cast<int>(k)];
    if (j < 0 || j >= static_cast<int>(f.size()))
      throw InsufficientMoments(std::string(hankel_name(k)) + " Schur complement [" +
                                std::to_string(j) + "] needs more moments");
    return f[static_cast<std::size_t>(j)];
  }
};

// Corner Schur complements of each Hankel family; the corner block's column
// above the diagonal is exactly the Y vector of that family.
inline SchurChain schur_chain(const HankelSet& hs) {
  SchurChain sc;
  const int q = hs.q;
  for (int k = 0; k < 4; ++k) {
    const auto kind = static_cast<HankelKind>(k);
    for (int j = 0; j < hs.count(kind); ++j) {
      const Mat& M = hs.get(kind, j);
      Mat corner = M.bottomRightCorner(q, q);
      if (j > 0) {
        const PdFactor f = PdFactor::of(hs.get(kind, j - 1), hankel_name(kind), j - 1);
        Mat Y = M.topRightCorner(j * q, q);
        corner -= f.form(Y, Y);
      }
      sc.hat[static_cast<std::size_t>(k)].push_back((corner + corner.adjoint()) / 2.0);
    }
  }
  return sc;
}

inline SchurChain schur_chain(const MomentSequence& seq) { return schur_chain(build_hankels(seq)); }

enum class Definiteness { PositiveDefinite, Degenerate, Indefinite };

inline const char* definiteness_name(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "PositiveDefinite";
    case Definiteness::Degenerate: return "Degenerate";
    case Definiteness::Indefinite: return "Indefinite";
  }
  return "?";
}

struct Classification {
  Definiteness status = Definiteness::PositiveDefinite;
  // Failing matrix and its smallest eigenvalue; empty when positive definite.
  std::string matrix;
  int index = -1;
  double witness = 0.0;

  bool positive_definite() const { return status == Definiteness::PositiveDefinite; }
};

inline Classification classify(const MomentSequence& seq) {
  const int m = seq.m();
  std::vector<std::pair<HankelKind, int>> required;
  if (m % 2 == 0) {
    const int n = m / 2;
    required.push_back({HankelKind::H1, n});
    if (n >= 1) required.push_back({HankelKind::H2, n - 1});
  } else {
    const int n = (m - 1) / 2;
    required.push_back({HankelKind::K1, n});
    required.push_back({HankelKind::K2, n});
  }
  Classification c;
  for (const auto& [kind, j] : required) {
    const Mat A = block_hankel(seq, kind, j);
    if (is_positive_definite(A)) continue;
    const double lam = min_eigenvalue(A);
    c.status = lam >= -kPivotThreshold * A.norm() ? Definiteness::Degenerate : Definiteness::Indefinite;
    c.matrix = hankel_name(kind);
    c.index = j;
    c.witness = lam;
    return c;
  }
  return c;
}

struct DiscreteMeasure {
  std::vector<double> points;
  std::vector<Mat> weights;
};

inline MomentSequence moments_from_discrete_measure(const std::vector<double>& points,
                                                    const std::vector<Mat>& weights, int count,
                                                    double a, double b) {
  if (points.empty()) throw EmptyMeasure();
  if (points.size() != weights.size())
    throw InconsistentLengths("points and weights differ in length");
  if (count < 0) throw InvalidSequence("moment count must be nonnegative");
  if (!(a < b)) throw InvalidSequence("interval endpoints must satisfy a < b");
  const Eigen::Index q = weights[0].rows();
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!(points[k] >= a && points[k] <= b)) throw PointOutsideInterval(points[k]);
    const Mat& w = weights[k];
    if (w.rows() != q || w.cols() != q) throw InvalidSequence("weights differ in size");
    if ((w - w.adjoint()).norm() > 1e-12 * (1.0 + w.norm()))
      throw InvalidSequence("weight " + std::to_string(k) + " is not Hermitian");
    if (min_eigenvalue(w) < -kPivotThreshold * w.norm())
      throw InvalidSequence("weight " + std::to_string(k) + " is not positive semidefinite");
  }
  std::vector<Mat> s(static_cast<std::size_t>(count) + 1, Mat::Zero(q, q));
  for (std::size_t k = 0; k < points.size(); ++k) {
    double p = 1.0;
    for (int j = 0; j <= count; ++j) {
      s[static_cast<std::size_t>(j)] += p * weights[k];
      p *= points[k];
    }
  }
  return MomentSequence(a, b, std::move(s));
}

inline MomentSequence moments_from_discrete_measure(const DiscreteMeasure& mu, int count, double a,
                                                    double b) {
  return moments_from_discrete_measure(mu.points, mu.weights, count, a, b);
}

}  // namespace thmm
