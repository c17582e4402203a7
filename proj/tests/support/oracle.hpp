#pragma once

// Exact-rational reference for scalar (q = 1) moment data. Everything here is
// computed from the defining block formulas with cpp_rational arithmetic and
// shares no code with the library.

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <vector>

namespace oracle {

using Q = boost::multiprecision::cpp_rational;

struct RMat {
  int n = 0;
  std::vector<Q> v;
  RMat() = default;
  explicit RMat(int size) : n(size), v(static_cast<std::size_t>(size * size), Q(0)) {}
  Q& operator()(int r, int c) { return v[static_cast<std::size_t>(r * n + c)]; }
  const Q& operator()(int r, int c) const { return v[static_cast<std::size_t>(r * n + c)]; }
};

inline RMat inverse(const RMat& A) {
  const int n = A.n;
  RMat M = A;
  RMat I(n);
  for (int i = 0; i < n; ++i) I(i, i) = 1;
  for (int c = 0; c < n; ++c) {
    int p = c;
    while (p < n && M(p, c) == 0) ++p;
    if (p == n) throw std::runtime_error("singular");
    for (int k = 0; k < n; ++k) {
      std::swap(M(c, k), M(p, k));
      std::swap(I(c, k), I(p, k));
    }
    const Q d = M(c, c);
    for (int k = 0; k < n; ++k) {
      M(c, k) /= d;
      I(c, k) /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c || M(r, c) == 0) continue;
      const Q f = M(r, c);
      for (int k = 0; k < n; ++k) {
        M(r, k) -= f * M(c, k);
        I(r, k) -= f * I(c, k);
      }
    }
  }
  return I;
}

inline Q det(RMat M) {
  const int n = M.n;
  Q d = 1;
  for (int c = 0; c < n; ++c) {
    int p = c;
    while (p < n && M(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (int k = 0; k < n; ++k) std::swap(M(c, k), M(p, k));
      d = -d;
    }
    d *= M(c, c);
    for (int r = c + 1; r < n; ++r) {
      const Q f = M(r, c) / M(c, c);
      for (int k = c; k < n; ++k) M(r, k) -= f * M(c, k);
    }
  }
  return d;
}

// Leading pivots of an LDL* elimination; all positive iff positive definite.
inline bool positive_definite(RMat M) {
  const int n = M.n;
  for (int c = 0; c < n; ++c) {
    if (M(c, c) <= 0) return false;
    for (int r = c + 1; r < n; ++r) {
      const Q f = M(r, c) / M(c, c);
      for (int k = c; k < n; ++k) M(r, k) -= f * M(c, k);
    }
  }
  return true;
}

inline Q quad(const std::vector<Q>& x, const RMat& A, const std::vector<Q>& y) {
  Q s = 0;
  for (int r = 0; r < A.n; ++r)
    for (int c = 0; c < A.n; ++c) s += x[static_cast<std::size_t>(r)] * A(r, c) * y[static_cast<std::size_t>(c)];
  return s;
}

inline Q power(const Q& x, int k) {
  Q r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

using Poly = std::vector<Q>;  // ascending coefficients

inline Q eval(const Poly& p, const Q& z) {
  Q r = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * z + *it;
  return r;
}

struct Scalar {
  std::vector<Q> s;
  Q a;
  Q b;

  Q shat(int j) const { return -a * b * s[j] + (a + b) * s[j + 1] - s[j + 2]; }
  Q k1(int i) const { return b * s[i] - s[i + 1]; }
  Q k2(int i) const { return -a * s[i] + s[i + 1]; }

  template <class F>
  RMat hankel(F f, int j) const {
    RMat M(j + 1);
    for (int r = 0; r <= j; ++r)
      for (int c = 0; c <= j; ++c) M(r, c) = f(r + c);
    return M;
  }
  RMat H1(int j) const { return hankel([&](int i) { return s[i]; }, j); }
  RMat H2(int j) const { return hankel([&](int i) { return shat(i); }, j); }
  RMat K1(int j) const { return hankel([&](int i) { return k1(i); }, j); }
  RMat K2(int j) const { return hankel([&](int i) { return k2(i); }, j); }

  // corner - Y* M_{j-1}^{-1} Y, directly from the block partition
  static Q corner_schur(const RMat& M) {
    const int j = M.n - 1;
    if (j == 0) return M(0, 0);
    RMat top(j);
    std::vector<Q> y(static_cast<std::size_t>(j));
    for (int r = 0; r < j; ++r) {
      for (int c = 0; c < j; ++c) top(r, c) = M(r, c);
      y[static_cast<std::size_t>(r)] = M(r, j);
    }
    return M(j, j) - quad(y, inverse(top), y);
  }

  // (-Y* M_{j-1}^{-1}, 1) for the Hankel family with entries f(i); the corner is never read
  template <class F>
  static std::vector<Q> row(F f, int j) {
    std::vector<Q> w(static_cast<std::size_t>(j + 1), Q(0));
    w[static_cast<std::size_t>(j)] = 1;
    if (j == 0) return w;
    RMat top(j);
    std::vector<Q> y(static_cast<std::size_t>(j));
    for (int r = 0; r < j; ++r) {
      for (int c = 0; c < j; ++c) top(r, c) = f(r + c);
      y[static_cast<std::size_t>(r)] = f(r + j);
    }
    const RMat ti = inverse(top);
    for (int c = 0; c < j; ++c) {
      Q acc = 0;
      for (int r = 0; r < j; ++r) acc += y[static_cast<std::size_t>(r)] * ti(r, c);
      w[static_cast<std::size_t>(c)] = -acc;
    }
    return w;
  }
  std::vector<Q> row1(int j) const { return row([&](int i) { return s[i]; }, j); }
  std::vector<Q> row2(int j) const { return row([&](int i) { return shat(i); }, j); }
  std::vector<Q> rowk1(int j) const { return row([&](int i) { return k1(i); }, j); }
  std::vector<Q> rowk2(int j) const { return row([&](int i) { return k2(i); }, j); }

  // w R_j(z) u as a polynomial in z
  static Poly times_column(const std::vector<Q>& w, const std::vector<Q>& u) {
    const int j = static_cast<int>(w.size()) - 1;
    Poly p(static_cast<std::size_t>(j + 1), Q(0));
    for (int l = 0; l <= j; ++l)
      for (int k = 0; k <= l; ++k) p[static_cast<std::size_t>(l - k)] += w[static_cast<std::size_t>(l)] * u[static_cast<std::size_t>(k)];
    return p;
  }

  std::vector<Q> ut1(int j) const {
    std::vector<Q> u{s[0]};
    for (int k = 1; k <= j; ++k) u.push_back(s[k] - b * s[k - 1]);
    return u;
  }
  std::vector<Q> ut2(int j) const {
    std::vector<Q> u{-s[0]};
    for (int k = 1; k <= j; ++k) u.push_back(-s[k] + a * s[k - 1]);
    return u;
  }
  std::vector<Q> u1(int j) const {
    std::vector<Q> u{Q(0)};
    for (int k = 1; k <= j; ++k) u.push_back(-s[k - 1]);
    return u;
  }
  std::vector<Q> u2(int j) const {
    std::vector<Q> u{-(a + b) * s[0] + s[1]};
    for (int k = 1; k <= j; ++k) u.push_back(-shat(k - 1));
    return u;
  }

  Poly P1(int j) const { return row1(j); }
  Poly P2(int j) const { return row2(j); }
  Poly G1(int j) const { return rowk1(j); }
  Poly G2(int j) const { return rowk2(j); }
  Poly Q1(int j) const {
    if (j == 0) return {Q(0)};
    Poly p = times_column(row1(j), u1(j));
    for (auto& c : p) c = -c;
    return p;
  }
  Poly Q2(int j) const {
    const auto w = row2(j);
    Poly p = times_column(w, u2(j));
    p.push_back(0);
    for (int l = 0; l <= j; ++l) p[static_cast<std::size_t>(l + 1)] += w[static_cast<std::size_t>(l)] * s[0];
    for (auto& c : p) c = -c;
    return p;
  }
  Poly T1(int j) const { return times_column(rowk1(j), ut1(j)); }
  Poly T2(int j) const { return times_column(rowk2(j), ut2(j)); }

  std::vector<Q> Ra(int j, const std::vector<Q>& u) const {
    std::vector<Q> out(u.size(), Q(0));
    for (int l = 0; l <= j; ++l) {
      Q p = 1;
      for (int k = l; k >= 0; --k) {
        out[static_cast<std::size_t>(l)] += p * u[static_cast<std::size_t>(k)];
        p *= a;
      }
    }
    return out;
  }
  std::vector<Q> unit(int j) const {
    std::vector<Q> v(static_cast<std::size_t>(j + 1), Q(0));
    v[0] = 1;
    return v;
  }

  Q that(int j) const {
    const auto x = Ra(j, unit(j));
    return quad(x, inverse(K1(j)), x);
  }
  Q qf(int j) const {
    if (j < 0) return 0;
    auto w = u2(j);
    w[0] += a * s[0];
    const auto x = Ra(j, w);
    return quad(x, inverse(H2(j)), x);
  }
  Q mhat(int j) const { return j == 0 ? that(0) : that(j) - that(j - 1); }
  Q lhat(int j) const { return j < 0 ? s[0] : qf(j) - qf(j - 1); }
  Q rhat(int j) const { return s[0] + qf(j - 1); }
  Q M(int j) const {
    auto h = [&](int i) {
      const auto x = Ra(i, unit(i));
      return quad(x, inverse(H1(i)), x);
    };
    return j == 0 ? 1 / s[0] : h(j) - h(j - 1);
  }
  Q L(int j) const {
    auto g = [&](int i) -> Q {
      if (i < 0) return 0;
      const auto x = Ra(i, ut2(i));
      return quad(x, inverse(K2(i)), x);
    };
    return g(j) - g(j - 1);
  }
};

inline Scalar lebesgue(int m) {
  Scalar r;
  for (int j = 0; j <= m; ++j) r.s.push_back(Q(1, j + 1));
  r.a = 0;
  r.b = 1;
  return r;
}

inline double to_double(const Q& x) { return static_cast<double>(x); }

}  // namespace oracle
