#pragma once

// Brute-force reference implementations used to freeze expected values.
// Deliberately independent of the mcnet kernel: plain vectors, explicit
// index loops, first qubit = most significant bit.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using cvec = std::vector<cd>;
using cmat = std::vector<std::vector<cd>>;

inline cvec kron(const cvec& a, const cvec& b) {
  cvec out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  }
  return out;
}

inline cmat zeros(std::size_t r, std::size_t c) {
  return cmat(r, std::vector<cd>(c, cd(0.0)));
}

inline cmat eye(std::size_t n) {
  cmat m = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

inline cmat mat_kron(const cmat& a, const cmat& b) {
  const std::size_t ar = a.size(), ac = a[0].size();
  const std::size_t br = b.size(), bc = b[0].size();
  cmat out = zeros(ar * br, ac * bc);
  for (std::size_t i = 0; i < ar; ++i)
    for (std::size_t j = 0; j < ac; ++j)
      for (std::size_t k = 0; k < br; ++k)
        for (std::size_t l = 0; l < bc; ++l)
          out[i * br + k][j * bc + l] = a[i][j] * b[k][l];
  return out;
}

inline cmat mat_mul(const cmat& a, const cmat& b) {
  cmat out = zeros(a.size(), b[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

inline cvec mat_apply(const cmat& m, const cvec& v) {
  cvec out(m.size(), cd(0.0));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

inline cmat dagger(const cmat& m) {
  cmat out = zeros(m[0].size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[0].size(); ++j) out[j][i] = std::conj(m[i][j]);
  return out;
}

inline cmat outer(const cvec& v) {
  cmat out = zeros(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i][j] = v[i] * std::conj(v[j]);
  return out;
}

inline double norm2(const cvec& v) {
  double s = 0.0;
  for (const cd& x : v) s += std::norm(x);
  return s;
}

inline cmat gate_x() { return {{cd(0), cd(1)}, {cd(1), cd(0)}}; }
inline cmat gate_z() { return {{cd(1), cd(0)}, {cd(0), cd(-1)}}; }
inline cmat gate_h() {
  const double s = 1.0 / std::sqrt(2.0);
  return {{cd(s), cd(s)}, {cd(s), cd(-s)}};
}

// Single-qubit gate at bit position `pos` (0 = most significant) of n qubits.
inline cmat embed1(const cmat& g, std::size_t n, std::size_t pos) {
  cmat m = eye(1);
  for (std::size_t k = 0; k < n; ++k) m = mat_kron(m, k == pos ? g : eye(2));
  return m;
}

// Controlled-Z between bit positions a and b of n qubits (diagonal).
inline cmat embed_cz(std::size_t n, std::size_t a, std::size_t b) {
  const std::size_t d = std::size_t(1) << n;
  cmat m = zeros(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const bool ba = (i >> (n - 1 - a)) & 1;
    const bool bb = (i >> (n - 1 - b)) & 1;
    m[i][i] = (ba && bb) ? cd(-1.0) : cd(1.0);
  }
  return m;
}

// Destructive projection <+_angle| (outcome 0) or <-_angle| (outcome 1) at
// bit position `pos` of n qubits; output has n-1 qubits.
inline cvec project(const cvec& v, std::size_t n, std::size_t pos, double angle,
                    int outcome) {
  const std::size_t dout = std::size_t(1) << (n - 1);
  const cd e0 = cd(1.0 / std::sqrt(2.0));
  const cd e1 = std::exp(cd(0.0, -angle)) / std::sqrt(2.0) * (outcome ? -1.0 : 1.0);
  cvec out(dout, cd(0.0));
  const std::size_t low_bits = n - 1 - pos;
  const std::size_t low_mask = (std::size_t(1) << low_bits) - 1;
  for (std::size_t r = 0; r < dout; ++r) {
    const std::size_t high = (r >> low_bits) << (low_bits + 1);
    const std::size_t low = r & low_mask;
    out[r] = e0 * v[high | low] + e1 * v[high | (std::size_t(1) << low_bits) | low];
  }
  return out;
}

inline cvec plus_state() {
  const double s = 1.0 / std::sqrt(2.0);
  return {cd(s), cd(s)};
}

// CZ |++> , the two-qubit entangled resource used by the protocols.
inline cvec graph_pair() {
  cvec v = kron(plus_state(), plus_state());
  v[3] = -v[3];
  return v;
}

}  // namespace oracle
