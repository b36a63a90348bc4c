#pragma once

// Test-only reference implementations. Nothing here calls into the
// contraction kernels under test.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "combtn/params.hpp"
#include "combtn/tensor.hpp"

namespace combtn::ref {

inline std::vector<std::size_t> unravel(std::size_t flat, const Shape& shape) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t i = shape.size(); i-- > 0;) {
    idx[i] = flat % shape[i];
    flat /= shape[i];
  }
  return idx;
}

inline std::size_t ravel(const std::vector<std::size_t>& idx, const Shape& shape) {
  std::size_t off = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) off = off * shape[i] + idx[i];
  return off;
}

/// Sum over paired indices by brute-force loops over every output and every
/// contracted multi-index.
inline Tensor reference_contract(const Tensor& a, const Tensor& b,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<bool> pa(a.rank(), false), pb(b.rank(), false);
  for (auto [i, j] : pairs) pa[i] = pb[j] = true;
  Shape out_shape, sum_shape;
  std::vector<std::size_t> fa, fb;
  for (std::size_t i = 0; i < a.rank(); ++i)
    if (!pa[i]) fa.push_back(i), out_shape.push_back(a.shape()[i]);
  for (std::size_t j = 0; j < b.rank(); ++j)
    if (!pb[j]) fb.push_back(j), out_shape.push_back(b.shape()[j]);
  for (auto [i, j] : pairs) sum_shape.push_back(a.shape()[i]);

  std::size_t out_n = 1, sum_n = 1;
  for (auto e : out_shape) out_n *= e;
  for (auto e : sum_shape) sum_n *= e;

  std::vector<double> out(out_n, 0.0);
  for (std::size_t o = 0; o < out_n; ++o) {
    const auto oi = unravel(o, out_shape);
    double acc = 0.0;
    for (std::size_t s = 0; s < sum_n; ++s) {
      const auto si = unravel(s, sum_shape);
      std::vector<std::size_t> ia(a.rank()), ib(b.rank());
      for (std::size_t k = 0; k < fa.size(); ++k) ia[fa[k]] = oi[k];
      for (std::size_t k = 0; k < fb.size(); ++k) ib[fb[k]] = oi[fa.size() + k];
      for (std::size_t k = 0; k < pairs.size(); ++k) ia[pairs[k].first] = ib[pairs[k].second] = si[k];
      acc += a.values()[ravel(ia, a.shape())] * b.values()[ravel(ib, b.shape())];
    }
    out[o] = acc;
  }
  return Tensor(out_shape, out);
}

/// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(std::vector<double> a, std::size_t n) {
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (a[piv * n + c] == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      det = -det;
    }
    det *= a[c * n + c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
    }
  }
  return det;
}

// The published closed forms written out directly, in 128-bit arithmetic.
inline __int128 printed_c_regular(const NetworkParams& p) {
  const __int128 N = p.tooth_length, M = p.teeth, D = p.raw_dim, d = p.compressed_dim, x = p.bond_dim;
  return N * M * D * d + 2 * x * d + (N * M - 2) * x * x * d + (N * M - 2) * x * x + x;
}

inline __int128 printed_c_comb(const NetworkParams& p) {
  const __int128 N = p.tooth_length, M = p.teeth, D = p.raw_dim, d = p.compressed_dim, x = p.bond_dim;
  return (N * d * D + d * x + (N - 1) * d * x * x + (N - 1) * x * x + x * x) * M + 2 * x * x +
         (M - 2) * x * x * x + (M - 2) * x * x + x;
}

inline bool rel_close(double a, double b, double rel) {
  if (a == b) return true;
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

/// Random network parameters with every extent in [1, max_extent].
inline NetworkParams random_small_params(std::mt19937_64& rng, std::size_t max_extent,
                                         std::size_t max_teeth, std::size_t max_tooth) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  NetworkParams p;
  p.raw_dim = pick(1, max_extent);
  p.compressed_dim = pick(1, p.raw_dim);
  p.bond_dim = pick(1, max_extent);
  p.teeth = pick(2, max_teeth);
  p.tooth_length = pick(1, max_tooth);
  return p;
}

}  // namespace combtn::ref
