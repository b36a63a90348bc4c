#pragma once

// Dense row-major tensors and instrumented pairwise contraction.
//
// Cost convention: contracting A and B over a set of paired axes costs
//   product(result extents) * product(paired extents)
// scalar multiplications. Additions are not counted, and a fused
// multiply-add counts once. A d-vector into an [x, d, x] site tensor is
// therefore x*x*d; an x-vector through an x-by-x matrix is x*x.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "combtn/checked.hpp"

namespace combtn {

using Shape = std::vector<std::size_t>;

inline std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

/// Number of elements of a shape; the empty shape is a scalar with one element.
inline Count element_count(const Shape& shape) {
  Count n = 1;
  for (auto e : shape) n = checked_mul(n, e);
  return n;
}

inline std::vector<std::size_t> row_major_strides(const Shape& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) strides[i - 1] = strides[i] * shape[i];
  return strides;
}

class Tensor {
 public:
  /// Scalar zero.
  Tensor() : data_(1, 0.0) {}

  /// Zero-filled tensor of the given shape.
  explicit Tensor(Shape shape) : shape_(std::move(shape)) {
    check_extents();
    data_.assign(element_count(shape_), 0.0);
  }

  Tensor(Shape shape, std::vector<double> values)
      : shape_(std::move(shape)), data_(std::move(values)) {
    check_extents();
    if (data_.size() != element_count(shape_)) {
      throw std::invalid_argument("tensor of shape " + shape_string(shape_) + " needs " +
                                  std::to_string(element_count(shape_)) + " elements, got " +
                                  std::to_string(data_.size()));
    }
  }

  static Tensor scalar(double v) { return Tensor({}, {v}); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<const double> values() const noexcept { return data_; }

  /// Value of a rank-0 tensor.
  double value() const {
    if (!shape_.empty()) {
      throw std::logic_error("value() on non-scalar tensor of shape " + shape_string(shape_));
    }
    return data_[0];
  }

  double at(std::span<const std::size_t> index) const { return data_[offset(index)]; }
  double at(std::initializer_list<std::size_t> index) const {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
  }

  std::size_t offset(std::span<const std::size_t> index) const {
    if (index.size() != shape_.size()) {
      throw std::out_of_range("index rank " + std::to_string(index.size()) +
                              " does not match tensor rank " + std::to_string(shape_.size()));
    }
    std::size_t off = 0;
    for (std::size_t i = 0; i < index.size(); ++i) {
      if (index[i] >= shape_[i]) throw std::out_of_range("tensor index out of range");
      off = off * shape_[i] + index[i];
    }
    return off;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  void check_extents() const {
    for (auto e : shape_) {
      if (e == 0) throw std::invalid_argument("tensor extents must be >= 1, got " + shape_string(shape_));
    }
  }

  Shape shape_;
  std::vector<double> data_;
};

/// Axes of A paired with axes of B for a contraction.
struct AxisPairing {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  AxisPairing() = default;
  AxisPairing(std::initializer_list<std::pair<std::size_t, std::size_t>> p) : pairs(p) {}
  explicit AxisPairing(std::vector<std::pair<std::size_t, std::size_t>> p) : pairs(std::move(p)) {}

  /// Throws std::invalid_argument unless every index is in range, no axis
  /// repeats on either side, and paired extents agree.
  void validate(const Shape& a, const Shape& b) const {
    std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
    for (auto [ia, ib] : pairs) {
      if (ia >= a.size() || ib >= b.size()) {
        throw std::invalid_argument("pairing (" + std::to_string(ia) + "," + std::to_string(ib) +
                                    ") out of range for shapes " + shape_string(a) + " and " +
                                    shape_string(b));
      }
      if (used_a[ia] || used_b[ib]) {
        throw std::invalid_argument("duplicate axis in pairing (" + std::to_string(ia) + "," +
                                    std::to_string(ib) + ")");
      }
      used_a[ia] = used_b[ib] = true;
      if (a[ia] != b[ib]) {
        throw std::invalid_argument("extent mismatch on paired axes (" + std::to_string(ia) + "," +
                                    std::to_string(ib) + "): " + std::to_string(a[ia]) +
                                    " vs " + std::to_string(b[ib]));
      }
    }
  }

  friend bool operator==(const AxisPairing&, const AxisPairing&) = default;
};

struct StepCost {
  Count multiplications = 0;
  friend bool operator==(const StepCost&, const StepCost&) = default;
};

namespace detail {

inline std::vector<std::size_t> free_axes(std::size_t rank, const std::vector<bool>& paired) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rank; ++i)
    if (!paired[i]) out.push_back(i);
  return out;
}

}  // namespace detail

inline bool is_permutation_of_axes(std::span<const std::size_t> perm, std::size_t rank) {
  if (perm.size() != rank) return false;
  std::vector<bool> seen(rank, false);
  for (auto p : perm) {
    if (p >= rank || seen[p]) return false;
    seen[p] = true;
  }
  return true;
}

/// Axis permutation with numpy semantics: result axis i is input axis perm[i].
/// Counts no multiplications.
inline Tensor transpose(const Tensor& a, std::span<const std::size_t> perm) {
  if (!is_permutation_of_axes(perm, a.rank())) {
    throw std::invalid_argument("invalid axis permutation for tensor of rank " +
                                std::to_string(a.rank()));
  }
  const auto& in_shape = a.shape();
  Shape out_shape(a.rank());
  for (std::size_t i = 0; i < perm.size(); ++i) out_shape[i] = in_shape[perm[i]];

  const auto in_strides = row_major_strides(in_shape);
  std::vector<std::size_t> src_stride(a.rank());
  for (std::size_t i = 0; i < perm.size(); ++i) src_stride[i] = in_strides[perm[i]];

  std::vector<double> out(a.size());
  std::vector<std::size_t> idx(a.rank(), 0);
  std::size_t src = 0;
  const auto in = a.values();
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    out[flat] = in[src];
    // odometer increment, last axis fastest
    for (std::size_t ax = idx.size(); ax-- > 0;) {
      if (++idx[ax] < out_shape[ax]) {
        src += src_stride[ax];
        break;
      }
      src -= src_stride[ax] * (out_shape[ax] - 1);
      idx[ax] = 0;
    }
  }
  return Tensor(std::move(out_shape), std::move(out));
}

inline Tensor transpose(const Tensor& a, std::initializer_list<std::size_t> perm) {
  return transpose(a, std::span<const std::size_t>(perm.begin(), perm.size()));
}

/// Multiplications a contraction of these shapes would cost; validates the pairing.
inline StepCost contraction_cost(const Shape& a, const Shape& b, const AxisPairing& pairing) {
  pairing.validate(a, b);
  std::vector<bool> pa(a.size(), false), pb(b.size(), false);
  Count contracted = 1;
  for (auto [ia, ib] : pairing.pairs) {
    pa[ia] = pb[ib] = true;
    contracted = checked_mul(contracted, a[ia]);
  }
  Count out = 1;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!pa[i]) out = checked_mul(out, a[i]);
  for (std::size_t i = 0; i < b.size(); ++i)
    if (!pb[i]) out = checked_mul(out, b[i]);
  return {checked_mul(out, contracted)};
}

/// Contracts `a` and `b` over the paired axes. The result carries the free
/// axes of `a` in order followed by the free axes of `b` in order.
inline std::pair<Tensor, StepCost> contract_pair(const Tensor& a, const Tensor& b,
                                                 const AxisPairing& pairing) {
  const StepCost cost = contraction_cost(a.shape(), b.shape(), pairing);

  std::vector<bool> pa(a.rank(), false), pb(b.rank(), false);
  for (auto [ia, ib] : pairing.pairs) pa[ia] = pb[ib] = true;
  const auto free_a = detail::free_axes(a.rank(), pa);
  const auto free_b = detail::free_axes(b.rank(), pb);

  // Bring both operands into matrix form: A as [free_a | paired], B as [paired | free_b].
  std::vector<std::size_t> perm_a = free_a, perm_b;
  for (auto [ia, ib] : pairing.pairs) {
    perm_a.push_back(ia);
    perm_b.push_back(ib);
  }
  perm_b.insert(perm_b.end(), free_b.begin(), free_b.end());

  const Tensor am = transpose(a, perm_a);
  const Tensor bm = transpose(b, perm_b);

  std::size_t rows = 1, inner = 1, cols = 1;
  Shape out_shape;
  for (auto ax : free_a) {
    rows *= a.shape()[ax];
    out_shape.push_back(a.shape()[ax]);
  }
  for (auto [ia, ib] : pairing.pairs) inner *= a.shape()[ia];
  for (auto ax : free_b) {
    cols *= b.shape()[ax];
    out_shape.push_back(b.shape()[ax]);
  }

  std::vector<double> out(rows * cols, 0.0);
  const auto av = am.values();
  const auto bv = bm.values();
  for (std::size_t i = 0; i < rows; ++i) {
    double* row = out.data() + i * cols;
    for (std::size_t k = 0; k < inner; ++k) {
      const double aik = av[i * inner + k];
      const double* brow = bv.data() + k * cols;
      for (std::size_t j = 0; j < cols; ++j) row[j] += aik * brow[j];
    }
  }
  return {Tensor(std::move(out_shape), std::move(out)), cost};
}

/// Normal distribution parameters for random_tensor.
struct Gaussian {
  double mean = 0.0;
  double stddev = 1.0;
};

/// Gaussian(0, 1/sqrt(fan_in)) where fan-in is the product of all extents
/// except the data-facing axis, if there is one.
inline Gaussian fan_in_gaussian(const Shape& shape, std::optional<std::size_t> physical_axis) {
  double fan_in = 1.0;
  for (std::size_t i = 0; i < shape.size(); ++i)
    if (!physical_axis || *physical_axis != i) fan_in *= static_cast<double>(shape[i]);
  return {0.0, 1.0 / std::sqrt(fan_in)};
}

/// Deterministic for a fixed (shape, seed, dist) on a given standard library.
inline Tensor random_tensor(const Shape& shape, std::uint64_t seed, Gaussian dist = {}) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(dist.mean, dist.stddev);
  std::vector<double> values(element_count(shape));
  for (auto& v : values) v = normal(rng);
  return Tensor(shape, std::move(values));
}

inline Tensor identity_matrix(std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  return Tensor({n, n}, std::move(v));
}

}  // namespace combtn
