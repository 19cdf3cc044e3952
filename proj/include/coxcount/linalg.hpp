#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <vector>

namespace coxcount {

using Int = mpz_class;
using Rat = mpq_class;

using QVec = std::vector<Rat>;
using QMat = std::vector<QVec>;  // row-major

inline QMat qmat(int rows, int cols) { return QMat(rows, QVec(cols, Rat(0))); }

// Determinant by fraction-free-ish Gaussian elimination on rationals.
inline Rat det(QMat m) {
  const int n = (int)m.size();
  Rat d(1);
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (m[r][c] != 0) { piv = r; break; }
    if (piv < 0) return Rat(0);
    if (piv != c) { std::swap(m[piv], m[c]); d = -d; }
    d *= m[c][c];
    const Rat inv = Rat(1) / m[c][c];
    for (int r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      const Rat f = m[r][c] * inv;
      for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return d;
}

// Solve m x = b; returns nullopt when the square system is singular.
inline std::optional<QVec> solve(QMat m, QVec b) {
  const int n = (int)m.size();
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (m[r][c] != 0) { piv = r; break; }
    if (piv < 0) return std::nullopt;
    if (piv != c) { std::swap(m[piv], m[c]); std::swap(b[piv], b[c]); }
    const Rat inv = Rat(1) / m[c][c];
    for (int k = c; k < n; ++k) m[c][k] *= inv;
    b[c] *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      const Rat f = m[r][c];
      for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      b[r] -= f * b[c];
    }
  }
  return b;
}

inline int rank(QMat m) {
  if (m.empty()) return 0;
  const int rows = (int)m.size(), cols = (int)m[0].size();
  int rk = 0;
  for (int c = 0; c < cols && rk < rows; ++c) {
    int piv = -1;
    for (int r = rk; r < rows; ++r)
      if (m[r][c] != 0) { piv = r; break; }
    if (piv < 0) continue;
    std::swap(m[piv], m[rk]);
    const Rat inv = Rat(1) / m[rk][c];
    for (int r = rk + 1; r < rows; ++r) {
      if (m[r][c] == 0) continue;
      const Rat f = m[r][c] * inv;
      for (int k = c; k < cols; ++k) m[r][k] -= f * m[rk][k];
    }
    ++rk;
  }
  return rk;
}

// Inverse of an integer matrix with det +-1; throws if not unimodular.
inline std::vector<std::vector<Int>> unimodular_inverse(const std::vector<std::vector<Int>>& a) {
  const int n = (int)a.size();
  QMat m = qmat(n, 2 * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m[r][c] = Rat(a[r][c]);
    m[r][n + r] = 1;
  }
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (m[r][c] != 0) { piv = r; break; }
    if (piv < 0) throw std::runtime_error("matrix not invertible");
    std::swap(m[piv], m[c]);
    const Rat inv = Rat(1) / m[c][c];
    for (int k = 0; k < 2 * n; ++k) m[c][k] *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      const Rat f = m[r][c];
      for (int k = 0; k < 2 * n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  std::vector<std::vector<Int>> out(n, std::vector<Int>(n));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      Rat v = m[r][n + c];
      if (v.get_den() != 1) throw std::runtime_error("matrix not unimodular");
      out[r][c] = v.get_num();
    }
  return out;
}

}  // namespace coxcount
