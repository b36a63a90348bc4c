#pragma once

// Builders for the compression-layer chain (MPS) and the comb network.
//
// Axis layouts, fixed for every builder and relied on by the schedules:
//
//   chain site, left end      [phys, right]
//   chain site, right end     [left, phys]
//   chain site, interior      [left, phys, right]
//   backbone, left end        [right, down]
//   backbone, right end       [left, down]
//   backbone, interior        [left, right, down]
//   tooth tensor, interior    [up, phys, down]
//   tooth tensor, free end    [up, phys]
//   compression U             [raw, compressed]
//   data vector               [raw]
//
// Sites are numbered left to right on the chain. On the comb site
// s = m * N + j sits on tooth m at depth j, counted from the backbone.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "combtn/params.hpp"
#include "combtn/tensor.hpp"

namespace combtn {

enum class NodeRole {
  SiteBoundary,
  SiteInterior,
  BackboneBoundary,
  BackboneInterior,
  ToothEnd,
  ToothInterior,
  Compression,
  Data,
};

inline const char* to_string(NodeRole r) {
  switch (r) {
    case NodeRole::SiteBoundary: return "SiteBoundary";
    case NodeRole::SiteInterior: return "SiteInterior";
    case NodeRole::BackboneBoundary: return "BackboneBoundary";
    case NodeRole::BackboneInterior: return "BackboneInterior";
    case NodeRole::ToothEnd: return "ToothEnd";
    case NodeRole::ToothInterior: return "ToothInterior";
    case NodeRole::Compression: return "Compression";
    case NodeRole::Data: return "Data";
  }
  return "?";
}

using NodeId = std::size_t;

struct Node {
  NodeId id = 0;
  NodeRole role = NodeRole::Data;
  std::string label;
  Tensor tensor;
  std::optional<std::size_t> physical_axis;  // data-facing axis, if any

  friend bool operator==(const Node&, const Node&) = default;
};

struct AxisRef {
  NodeId node = 0;
  std::size_t axis = 0;
  friend bool operator==(const AxisRef&, const AxisRef&) = default;
};

struct Bond {
  AxisRef a;
  AxisRef b;
  std::size_t dim = 0;
  friend bool operator==(const Bond&, const Bond&) = default;
};

/// Row-major matrix of raw data vectors, one row per site.
struct DataMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DataMatrix() = default;
  DataMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

class TensorNetwork {
 public:
  TensorNetwork(NetworkParams params, Geometry geometry, std::vector<Node> nodes,
                std::vector<Bond> bonds)
      : params_(params), geometry_(geometry), nodes_(std::move(nodes)), bonds_(std::move(bonds)) {
    check_well_formed();
  }

  const NetworkParams& params() const noexcept { return params_; }
  Geometry geometry() const noexcept { return geometry_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Bond>& bonds() const noexcept { return bonds_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }

  std::size_t sites() const noexcept { return params_.sites(); }

  /// Node holding the physical leg of site s.
  NodeId site_node(std::size_t s) const {
    check_site(s);
    return geometry_ == Geometry::Mps ? s : params_.teeth + s;
  }
  NodeId compression_node(std::size_t s) const {
    check_site(s);
    return first_compression() + s;
  }
  NodeId data_node(std::size_t s) const {
    check_site(s);
    return first_compression() + sites() + s;
  }
  NodeId backbone_node(std::size_t m) const {
    if (geometry_ != Geometry::Comb) throw std::logic_error("chain networks have no backbone");
    if (m >= params_.teeth) throw std::out_of_range("backbone index out of range");
    return m;
  }
  /// Comb tooth tensor at depth j (0 = attached to the backbone).
  NodeId tooth_node(std::size_t m, std::size_t j) const {
    if (geometry_ != Geometry::Comb) throw std::logic_error("chain networks have no teeth");
    if (m >= params_.teeth || j >= params_.tooth_length) throw std::out_of_range("tooth index out of range");
    return site_node(m * params_.tooth_length + j);
  }

  /// Copy with one node's tensor replaced; the shape must not change.
  TensorNetwork with_tensor(NodeId id, Tensor t) const {
    std::vector<std::pair<NodeId, Tensor>> one;
    one.emplace_back(id, std::move(t));
    return with_tensors(std::move(one));
  }

  TensorNetwork with_tensors(std::vector<std::pair<NodeId, Tensor>> replacements) const {
    TensorNetwork out = *this;
    for (auto& [id, t] : replacements) {
      if (t.shape() != node(id).tensor.shape()) {
        throw std::invalid_argument("replacement tensor for " + node(id).label + " has shape " +
                                    shape_string(t.shape()) + ", expected " +
                                    shape_string(node(id).tensor.shape()));
      }
      out.nodes_[id].tensor = std::move(t);
    }
    return out;
  }

  /// Every bond connects existing axes of equal extent, each axis used at most once.
  void check_well_formed() const {
    std::vector<std::vector<bool>> used(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].id != i) throw std::invalid_argument("node ids must be dense and ordered");
      used[i].assign(nodes_[i].tensor.rank(), false);
    }
    for (const auto& b : bonds_) {
      for (const AxisRef& end : {b.a, b.b}) {
        if (end.node >= nodes_.size() || end.axis >= nodes_[end.node].tensor.rank()) {
          throw std::invalid_argument("bond endpoint out of range");
        }
        if (used[end.node][end.axis]) {
          throw std::invalid_argument("axis " + std::to_string(end.axis) + " of " +
                                      nodes_[end.node].label + " bonded twice");
        }
        used[end.node][end.axis] = true;
        if (nodes_[end.node].tensor.shape()[end.axis] != b.dim) {
          throw std::invalid_argument("bond extent mismatch at " + nodes_[end.node].label);
        }
      }
    }
  }

  friend bool operator==(const TensorNetwork&, const TensorNetwork&) = default;

 private:
  NodeId first_compression() const {
    return geometry_ == Geometry::Mps ? sites() : params_.teeth + sites();
  }
  void check_site(std::size_t s) const {
    if (s >= sites()) throw std::out_of_range("site index " + std::to_string(s) + " out of range");
  }

  NetworkParams params_;
  Geometry geometry_;
  std::vector<Node> nodes_;
  std::vector<Bond> bonds_;
};

namespace detail {

inline std::uint64_t node_seed(std::uint64_t seed, NodeId id) {
  // splitmix64 finalizer over (seed, id)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(id) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline Node make_node(NodeId id, NodeRole role, std::string label, Shape shape,
                      std::optional<std::size_t> physical_axis, std::uint64_t seed) {
  const Gaussian dist = fan_in_gaussian(shape, physical_axis);
  return Node{id, role, std::move(label), random_tensor(shape, node_seed(seed, id), dist),
              physical_axis};
}

// Compression and data nodes for sites [0, L), appended after `first`, plus
// their physical and data bonds. `site_ids[s]` and `site_phys[s]` locate the
// physical leg of site s.
inline void append_compression_layer(const NetworkParams& p, std::uint64_t seed,
                                     const std::vector<NodeId>& site_ids,
                                     const std::vector<std::size_t>& site_phys,
                                     std::vector<Node>& nodes, std::vector<Bond>& bonds) {
  const std::size_t L = site_ids.size();
  const NodeId first_u = nodes.size();
  for (std::size_t s = 0; s < L; ++s) {
    nodes.push_back(make_node(first_u + s, NodeRole::Compression, "U[" + std::to_string(s) + "]",
                              {p.raw_dim, p.compressed_dim}, 0, seed));
  }
  const NodeId first_data = nodes.size();
  for (std::size_t s = 0; s < L; ++s) {
    nodes.push_back(make_node(first_data + s, NodeRole::Data, "data[" + std::to_string(s) + "]",
                              {p.raw_dim}, 0, seed));
  }
  for (std::size_t s = 0; s < L; ++s)
    bonds.push_back({{first_u + s, 1}, {site_ids[s], site_phys[s]}, p.compressed_dim});
  for (std::size_t s = 0; s < L; ++s)
    bonds.push_back({{first_data + s, 0}, {first_u + s, 0}, p.raw_dim});
}

}  // namespace detail

/// Chain of M*N site tensors, each fed by its own compression matrix and data vector.
inline TensorNetwork build_mps(const NetworkParams& p, std::uint64_t seed) {
  p.validate();
  const std::size_t L = p.sites();
  if (L < 2) throw std::invalid_argument("chain needs at least 2 sites (M*N >= 2)");
  const std::size_t d = p.compressed_dim, x = p.bond_dim;

  std::vector<Node> nodes;
  std::vector<NodeId> ids;
  std::vector<std::size_t> phys;
  for (std::size_t s = 0; s < L; ++s) {
    const std::string label = "A[" + std::to_string(s) + "]";
    if (s == 0) {
      nodes.push_back(detail::make_node(s, NodeRole::SiteBoundary, label, {d, x}, 0, seed));
      phys.push_back(0);
    } else if (s + 1 == L) {
      nodes.push_back(detail::make_node(s, NodeRole::SiteBoundary, label, {x, d}, 1, seed));
      phys.push_back(1);
    } else {
      nodes.push_back(detail::make_node(s, NodeRole::SiteInterior, label, {x, d, x}, 1, seed));
      phys.push_back(1);
    }
    ids.push_back(s);
  }

  std::vector<Bond> bonds;
  detail::append_compression_layer(p, seed, ids, phys, nodes, bonds);
  for (std::size_t s = 0; s + 1 < L; ++s) {
    const std::size_t right_axis = (s == 0) ? 1 : 2;
    bonds.push_back({{s, right_axis}, {s + 1, 0}, x});
  }
  return TensorNetwork(p, Geometry::Mps, std::move(nodes), std::move(bonds));
}

/// Backbone of M tensors, each carrying a tooth of N site tensors.
inline TensorNetwork build_comb(const NetworkParams& p, std::uint64_t seed) {
  p.validate();
  const std::size_t M = p.teeth, N = p.tooth_length;
  const std::size_t d = p.compressed_dim, x = p.bond_dim;

  std::vector<Node> nodes;
  for (std::size_t m = 0; m < M; ++m) {
    const std::string label = "B[" + std::to_string(m) + "]";
    if (m == 0 || m + 1 == M) {
      nodes.push_back(detail::make_node(m, NodeRole::BackboneBoundary, label, {x, x}, std::nullopt, seed));
    } else {
      nodes.push_back(detail::make_node(m, NodeRole::BackboneInterior, label, {x, x, x}, std::nullopt, seed));
    }
  }
  std::vector<NodeId> ids;
  std::vector<std::size_t> phys;
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t j = 0; j < N; ++j) {
      const NodeId id = nodes.size();
      const std::string label = "T[" + std::to_string(m) + "][" + std::to_string(j) + "]";
      if (j + 1 == N) {
        nodes.push_back(detail::make_node(id, NodeRole::ToothEnd, label, {x, d}, 1, seed));
      } else {
        nodes.push_back(detail::make_node(id, NodeRole::ToothInterior, label, {x, d, x}, 1, seed));
      }
      ids.push_back(id);
      phys.push_back(1);
    }
  }

  std::vector<Bond> bonds;
  detail::append_compression_layer(p, seed, ids, phys, nodes, bonds);
  for (std::size_t m = 0; m < M; ++m) {
    const std::size_t down_axis = (m == 0 || m + 1 == M) ? 1 : 2;
    const NodeId top = M + m * N;
    bonds.push_back({{m, down_axis}, {top, 0}, x});
    for (std::size_t j = 0; j + 1 < N; ++j) bonds.push_back({{top + j, 2}, {top + j + 1, 0}, x});
  }
  for (std::size_t m = 0; m + 1 < M; ++m) {
    const std::size_t right_axis = (m == 0) ? 0 : 1;
    bonds.push_back({{m, right_axis}, {m + 1, 0}, x});
  }
  return TensorNetwork(p, Geometry::Comb, std::move(nodes), std::move(bonds));
}

/// Replaces the data vectors, one matrix row per site in site order.
inline TensorNetwork attach_data(const TensorNetwork& net, const DataMatrix& data) {
  if (data.rows != net.sites() || data.cols != net.params().raw_dim) {
    throw std::invalid_argument("data matrix is " + std::to_string(data.rows) + "x" +
                                std::to_string(data.cols) + ", expected " +
                                std::to_string(net.sites()) + "x" +
                                std::to_string(net.params().raw_dim));
  }
  std::vector<std::pair<NodeId, Tensor>> rows;
  for (std::size_t s = 0; s < data.rows; ++s) {
    const auto first = data.values.begin() + static_cast<std::ptrdiff_t>(s * data.cols);
    const auto last = first + static_cast<std::ptrdiff_t>(data.cols);
    rows.emplace_back(net.data_node(s), Tensor({data.cols}, std::vector<double>(first, last)));
  }
  return net.with_tensors(std::move(rows));
}

/// Orthonormal-column [D, d] matrix from Gaussian columns by modified
/// Gram-Schmidt, applied twice.
inline Tensor orthonormal_columns(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (cols > rows) throw std::invalid_argument("cannot fit more orthonormal columns than rows");
  Tensor g = random_tensor({rows, cols}, seed);
  std::vector<double> a(g.values().begin(), g.values().end());
  auto col = [&](std::size_t i, std::size_t j) -> double& { return a[i * cols + j]; };
  for (std::size_t j = 0; j < cols; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < rows; ++i) dot += col(i, k) * col(i, j);
        for (std::size_t i = 0; i < rows; ++i) col(i, j) -= dot * col(i, k);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < rows; ++i) norm += col(i, j) * col(i, j);
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw std::runtime_error("Gram-Schmidt hit a dependent column");
    for (std::size_t i = 0; i < rows; ++i) col(i, j) /= norm;
  }
  return Tensor({rows, cols}, std::move(a));
}

/// Copy whose compression matrices all have orthonormal columns.
inline TensorNetwork set_orthonormal_compressions(const TensorNetwork& net, std::uint64_t seed) {
  const auto& p = net.params();
  std::vector<std::pair<NodeId, Tensor>> us;
  for (std::size_t s = 0; s < net.sites(); ++s) {
    const NodeId id = net.compression_node(s);
    us.emplace_back(id, orthonormal_columns(p.raw_dim, p.compressed_dim, detail::node_seed(seed, id)));
  }
  return net.with_tensors(std::move(us));
}

}  // namespace combtn
