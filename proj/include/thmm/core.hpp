#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace thmm {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// Exit-code classes: InputError -> 2, MathError -> 3, RouteMismatch -> 4.

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class MathError : public Error {
 public:
  using Error::Error;
};

class RouteMismatch : public Error {
 public:
  RouteMismatch(std::string param, int j, double residual)
      : Error("route mismatch for " + param + "[" + std::to_string(j) +
              "]: residual " + sci(residual)),
        param_(std::move(param)), j_(j), residual_(residual) {}
  const std::string& param() const { return param_; }
  int index() const { return j_; }
  double residual() const { return residual_; }

 private:
  std::string param_;
  int j_;
  double residual_;
};

class InvalidSequence : public InputError {
 public:
  using InputError::InputError;
};

class EmptyMeasure : public InputError {
 public:
  EmptyMeasure() : InputError("measure has no atoms") {}
};

class PointOutsideInterval : public InputError {
 public:
  explicit PointOutsideInterval(double x)
      : InputError("atom " + std::to_string(x) + " lies outside [a,b]") {}
};

class InconsistentLengths : public InputError {
 public:
  using InputError::InputError;
};

class WrongMatrixSize : public InputError {
 public:
  using InputError::InputError;
};

class InsufficientMoments : public MathError {
 public:
  using MathError::MathError;
};

class OrderUnavailable : public MathError {
 public:
  OrderUnavailable(std::string family, int j)
      : MathError("order " + std::to_string(j) + " of " + family +
                  " is not available from the given moments"),
        family_(std::move(family)), j_(j) {}
  const std::string& family() const { return family_; }
  int index() const { return j_; }

 private:
  std::string family_;
  int j_;
};

class SingularPivot : public MathError {
 public:
  SingularPivot(std::string family, int j)
      : MathError(family + "[" + std::to_string(j) + "] is not positive definite"),
        family_(std::move(family)), j_(j) {}
  const std::string& family() const { return family_; }
  int index() const { return j_; }

 private:
  std::string family_;
  int j_;
};

class SingularNormalization : public MathError {
 public:
  using MathError::MathError;
};

class PoleAtZ : public MathError {
 public:
  using MathError::MathError;
};

class PointOnInterval : public MathError {
 public:
  PointOnInterval() : MathError("z lies on [a,b]") {}
};

class SingularDenominator : public MathError {
 public:
  explicit SingularDenominator(double cond)
      : MathError("denominator is singular (condition " + sci(cond) + ")"),
        cond_(cond) {}
  double condition() const { return cond_; }

 private:
  double cond_;
};

class SingularLevel : public MathError {
 public:
  explicit SingularLevel(int depth)
      : MathError("continued fraction level " + std::to_string(depth) + " is singular"),
        depth_(depth) {}
  int depth() const { return depth_; }

 private:
  int depth_;
};

class NonPositiveParameter : public MathError {
 public:
  explicit NonPositiveParameter(std::string index)
      : MathError("parameter " + index + " is not positive definite"), index_(std::move(index)) {}
  const std::string& index() const { return index_; }

 private:
  std::string index_;
};

constexpr double kPivotThreshold = 1e-12;
constexpr double kConditionLimit = 1e12;

inline Mat eye(int q) { return Mat::Identity(q, q); }
inline Mat zeros(int r, int c) { return Mat::Zero(r, c); }

// Hermitian positive-definite factorization A = L L*.
class PdFactor {
 public:
  static bool attempt(const Mat& A, PdFactor& out) {
    const Eigen::Index n = A.rows();
    const double thr = kPivotThreshold * A.norm();
    Mat L = Mat::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      double d = A(k, k).real();
      for (Eigen::Index p = 0; p < k; ++p) d -= std::norm(L(k, p));
      if (!(d > thr)) return false;
      const double dk = std::sqrt(d);
      L(k, k) = dk;
      for (Eigen::Index i = k + 1; i < n; ++i) {
        cplx t = A(i, k);
        for (Eigen::Index p = 0; p < k; ++p) t -= L(i, p) * std::conj(L(k, p));
        L(i, k) = t / dk;
      }
    }
    out.L_ = std::move(L);
    return true;
  }

  static PdFactor of(const Mat& A, const std::string& family, int j) {
    PdFactor f;
    if (!attempt(A, f)) throw SingularPivot(family, j);
    return f;
  }

  Mat solve(const Mat& B) const {
    Mat y = L_.triangularView<Eigen::Lower>().solve(B);
    return L_.adjoint().triangularView<Eigen::Upper>().solve(y);
  }
  Mat inverse() const { return solve(Mat::Identity(L_.rows(), L_.cols())); }
  // X* A^{-1} Y
  Mat form(const Mat& X, const Mat& Y) const {
    Mat lx = L_.triangularView<Eigen::Lower>().solve(X);
    Mat ly = L_.triangularView<Eigen::Lower>().solve(Y);
    return lx.adjoint() * ly;
  }
  const Mat& lower() const { return L_; }

 private:
  Mat L_;
};

inline bool is_positive_definite(const Mat& A) {
  PdFactor f;
  return PdFactor::attempt(A, f);
}

inline double min_eigenvalue(const Mat& A) {
  Mat h = (A + A.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double condition_number(const Mat& A) {
  if (A.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(A);
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  if (!(lo > 0.0) || !std::isfinite(s(0))) return std::numeric_limits<double>::infinity();
  return s(0) / lo;
}

inline Mat inv(const Mat& A) { return A.partialPivLu().inverse(); }

// Inverse of a normalizing value; raises when numerically singular.
inline Mat inv_normalizer(const Mat& A, const std::string& what) {
  const double c = condition_number(A);
  if (!(c <= kConditionLimit))
    throw SingularNormalization(what + " is numerically singular (condition " + sci(c) + ")");
  return inv(A);
}

inline bool is_finite(const Mat& A) { return A.allFinite(); }

inline double rel_residual(const Mat& A, const Mat& B) {
  const double scale = std::max(A.norm(), B.norm());
  if (scale == 0.0) return 0.0;
  return (A - B).norm() / scale;
}

inline Mat block2(const Mat& A, const Mat& B, const Mat& C, const Mat& D) {
  const Eigen::Index q = A.rows();
  Mat M(2 * q, 2 * q);
  M << A, B, C, D;
  return M;
}

inline Mat upper_unit(const Mat& X) {
  const int q = static_cast<int>(X.rows());
  return block2(eye(q), X, zeros(q, q), eye(q));
}

inline Mat lower_unit(const Mat& X) {
  const int q = static_cast<int>(X.rows());
  return block2(eye(q), zeros(q, q), X, eye(q));
}

inline Mat diag2(cplx x, cplx y, int q) {
  return block2(x * eye(q), zeros(q, q), zeros(q, q), y * eye(q));
}

inline Mat top_left(const Mat& U) { const auto q = U.rows() / 2; return U.topLeftCorner(q, q); }
inline Mat top_right(const Mat& U) { const auto q = U.rows() / 2; return U.topRightCorner(q, q); }
inline Mat bottom_left(const Mat& U) { const auto q = U.rows() / 2; return U.bottomLeftCorner(q, q); }
inline Mat bottom_right(const Mat& U) { const auto q = U.rows() / 2; return U.bottomRightCorner(q, q); }

struct IdentityCheck {
  std::string name;
  int j = 0;
  int k = 0;
  double residual = 0.0;
  // Informational checks record printed variants that are known not to hold.
  bool normative = true;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;

  void add(std::string name, int j, double residual, bool normative = true) {
    checks.push_back({std::move(name), j, 0, residual, normative});
  }
  void add(std::string name, int j, int k, double residual, bool normative = true) {
    checks.push_back({std::move(name), j, k, residual, normative});
  }

  double max_residual(std::string_view prefix = "") const {
    double r = 0.0;
    for (const auto& c : checks)
      if (c.normative && c.name.compare(0, prefix.size(), prefix) == 0) r = std::max(r, c.residual);
    return r;
  }

  double max_informational(std::string_view prefix) const {
    double r = 0.0;
    for (const auto& c : checks)
      if (!c.normative && c.name.compare(0, prefix.size(), prefix) == 0) r = std::max(r, c.residual);
    return r;
  }

  bool contains(std::string_view prefix) const {
    for (const auto& c : checks)
      if (c.name.compare(0, prefix.size(), prefix) == 0) return true;
    return false;
  }

  void merge(const IdentityReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  }
};

}  // namespace thmm
