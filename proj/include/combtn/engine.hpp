#pragma once

// Fixed contraction schedules for both geometries, instrumented execution,
// and a naive value oracle that shares no code path with the schedules.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "combtn/checked.hpp"
#include "combtn/costmodel.hpp"
#include "combtn/network.hpp"
#include "combtn/tensor.hpp"

namespace combtn {

/// Operand of a plan step. Ids below the plan's node count name network
/// nodes; id node_count + k names the result of step k.
using OperandId = std::size_t;

struct PlanStep {
  OperandId lhs = 0;
  OperandId rhs = 0;
  AxisPairing pairing;
  Phase phase = Phase::Compress;
};

struct ContractionPlan {
  Geometry geometry = Geometry::Mps;
  NetworkParams params;
  std::size_t node_count = 0;
  std::vector<PlanStep> steps;

  OperandId result_of(std::size_t step) const { return node_count + step; }
};

struct CostReport {
  std::map<Phase, Count> per_phase;
  Count total = 0;
  Count analytic_printed = 0;
  Count analytic_schedule = 0;
  SignedCount residual_printed_minus_measured = 0;
  std::size_t peak_live_elements = 0;  // informational

  friend bool operator==(const CostReport&, const CostReport&) = default;
};

struct ContractionResult {
  double value = 0.0;
  CostReport cost;
};

namespace detail {

class PlanBuilder {
 public:
  PlanBuilder(const TensorNetwork& net) {
    plan_.geometry = net.geometry();
    plan_.params = net.params();
    plan_.node_count = net.nodes().size();
  }

  OperandId add(OperandId lhs, OperandId rhs, AxisPairing pairing, Phase phase) {
    plan_.steps.push_back({lhs, rhs, std::move(pairing), phase});
    return plan_.result_of(plan_.steps.size() - 1);
  }

  ContractionPlan take() { return std::move(plan_); }

 private:
  ContractionPlan plan_;
};

// Compress every data vector of `sites` through its U, then absorb the
// result into the site tensor. Returns the absorbed operand per site.
inline std::vector<OperandId> compress_and_absorb(const TensorNetwork& net, PlanBuilder& b,
                                                  const std::vector<std::size_t>& sites) {
  std::vector<OperandId> compressed;
  for (auto s : sites)
    compressed.push_back(b.add(net.data_node(s), net.compression_node(s), {{0, 0}}, Phase::Compress));
  std::vector<OperandId> absorbed;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const Node& site = net.node(net.site_node(sites[i]));
    absorbed.push_back(b.add(site.id, compressed[i], {{*site.physical_axis, 0}}, Phase::AbsorbPhysical));
  }
  return absorbed;
}

}  // namespace detail

/// Chain schedule: compress all data, absorb into the sites, sweep left to
/// right with vector-matrix products, finish with a dot product.
inline ContractionPlan mps_plan(const TensorNetwork& net) {
  if (net.geometry() != Geometry::Mps) throw std::invalid_argument("mps_plan needs a chain network");
  const std::size_t L = net.sites();
  detail::PlanBuilder b(net);
  std::vector<std::size_t> all(L);
  for (std::size_t s = 0; s < L; ++s) all[s] = s;
  const auto v = detail::compress_and_absorb(net, b, all);

  OperandId acc = v[0];
  for (std::size_t s = 1; s + 1 < L; ++s) acc = b.add(acc, v[s], {{0, 0}}, Phase::ChainSweep);
  b.add(acc, v[L - 1], {{0, 0}}, Phase::FinalDot);
  return b.take();
}

/// Comb schedule: each tooth is compressed, absorbed and swept from its free
/// end to the backbone; the resulting vectors are absorbed into the backbone,
/// which is then swept left to right.
inline ContractionPlan comb_plan(const TensorNetwork& net) {
  if (net.geometry() != Geometry::Comb) throw std::invalid_argument("comb_plan needs a comb network");
  const std::size_t M = net.params().teeth, N = net.params().tooth_length;
  detail::PlanBuilder b(net);

  std::vector<OperandId> tooth_vectors;
  for (std::size_t m = 0; m < M; ++m) {
    std::vector<std::size_t> sites(N);
    for (std::size_t j = 0; j < N; ++j) sites[j] = m * N + j;
    const auto v = detail::compress_and_absorb(net, b, sites);
    // v[j] for j < N-1 is [up, down]; the running vector meets its down leg.
    OperandId acc = v[N - 1];
    for (std::size_t j = N - 1; j-- > 0;) acc = b.add(acc, v[j], {{0, 1}}, Phase::ToothSweep);
    tooth_vectors.push_back(acc);
  }

  std::vector<OperandId> backbone;
  for (std::size_t m = 0; m < M; ++m) {
    const std::size_t down = (m == 0 || m + 1 == M) ? 1 : 2;
    backbone.push_back(b.add(net.backbone_node(m), tooth_vectors[m], {{down, 0}}, Phase::ToothToBackbone));
  }

  OperandId acc = backbone[0];
  for (std::size_t m = 1; m + 1 < M; ++m) acc = b.add(acc, backbone[m], {{0, 0}}, Phase::ChainSweep);
  b.add(acc, backbone[M - 1], {{0, 0}}, Phase::FinalDot);
  return b.take();
}

inline ContractionPlan plan_for(const TensorNetwork& net) {
  return net.geometry() == Geometry::Mps ? mps_plan(net) : comb_plan(net);
}

/// Runs `plan` on `net`, consuming each operand exactly once.
inline ContractionResult execute(const TensorNetwork& net, const ContractionPlan& plan) {
  if (plan.geometry != net.geometry() || plan.params != net.params() ||
      plan.node_count != net.nodes().size()) {
    throw std::invalid_argument("plan/network mismatch: plan was built for a different network");
  }
  if (plan.steps.empty()) throw std::invalid_argument("plan has no steps");

  const std::size_t n = plan.node_count;
  std::vector<std::optional<Tensor>> intermediates(plan.steps.size());
  std::vector<bool> consumed(n + plan.steps.size(), false);
  std::size_t live_elements = 0;
  for (const auto& node : net.nodes()) live_elements += node.tensor.size();

  ContractionResult out;
  out.cost.peak_live_elements = live_elements;

  auto fetch = [&](OperandId id, std::size_t step) -> const Tensor& {
    if (id >= n + step) {
      throw std::invalid_argument("step " + std::to_string(step) + " uses operand " +
                                  std::to_string(id) + " before it is produced");
    }
    if (consumed[id]) {
      throw std::invalid_argument("step " + std::to_string(step) + " reuses consumed operand " +
                                  std::to_string(id));
    }
    return id < n ? net.node(id).tensor : *intermediates[id - n];
  };

  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const auto& step = plan.steps[k];
    if (step.lhs == step.rhs) throw std::invalid_argument("step contracts an operand with itself");
    const Tensor& a = fetch(step.lhs, k);
    const Tensor& b = fetch(step.rhs, k);
    auto [result, cost] = contract_pair(a, b, step.pairing);
    out.cost.per_phase[step.phase] = checked_add(out.cost.per_phase[step.phase], cost.multiplications);
    out.cost.total = checked_add(out.cost.total, cost.multiplications);

    live_elements += result.size();
    out.cost.peak_live_elements = std::max(out.cost.peak_live_elements, live_elements);
    for (OperandId id : {step.lhs, step.rhs}) {
      consumed[id] = true;
      if (id >= n) {
        live_elements -= intermediates[id - n]->size();
        intermediates[id - n].reset();
      } else {
        live_elements -= net.node(id).tensor.size();
      }
    }
    intermediates[k] = std::move(result);
  }

  for (std::size_t id = 0; id < n; ++id) {
    if (!consumed[id]) throw std::invalid_argument("plan leaves node " + net.node(id).label + " uncontracted");
  }
  for (std::size_t k = 0; k + 1 < plan.steps.size(); ++k) {
    if (!consumed[n + k]) throw std::invalid_argument("plan leaves intermediate of step " + std::to_string(k) + " unused");
  }
  const Tensor& last = *intermediates.back();
  if (last.rank() != 0) throw std::invalid_argument("plan does not reduce the network to a scalar");
  out.value = last.value();

  const auto& p = net.params();
  if (net.geometry() == Geometry::Mps) {
    out.cost.analytic_printed = c_regular(p);
    out.cost.analytic_schedule = out.cost.analytic_printed;
  } else {
    out.cost.analytic_printed = c_comb_printed(p);
    out.cost.analytic_schedule = c_comb_schedule(p);
  }
  out.cost.residual_printed_minus_measured = signed_difference(out.cost.analytic_printed, out.cost.total);
  return out;
}

/// Largest intermediate, in elements, the oracle is allowed to form.
inline constexpr Count kOracleElementLimit = 10'000'000;

namespace detail {

struct LabeledTensor {
  Tensor tensor;
  std::vector<std::size_t> labels;  // bond id per axis
};

// out[free_a..., free_b...] = sum over shared labels of a * b, by direct
// index enumeration.
inline LabeledTensor naive_contract(const LabeledTensor& a, const LabeledTensor& b) {
  std::vector<std::pair<std::size_t, std::size_t>> shared;
  std::vector<std::size_t> free_a, free_b;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    const auto it = std::find(b.labels.begin(), b.labels.end(), a.labels[i]);
    if (it == b.labels.end()) {
      free_a.push_back(i);
    } else {
      shared.emplace_back(i, static_cast<std::size_t>(it - b.labels.begin()));
    }
  }
  for (std::size_t j = 0; j < b.labels.size(); ++j) {
    if (std::find(a.labels.begin(), a.labels.end(), b.labels[j]) == a.labels.end()) free_b.push_back(j);
  }

  Shape out_shape;
  std::vector<std::size_t> out_labels;
  for (auto i : free_a) {
    out_shape.push_back(a.tensor.shape()[i]);
    out_labels.push_back(a.labels[i]);
  }
  for (auto j : free_b) {
    out_shape.push_back(b.tensor.shape()[j]);
    out_labels.push_back(b.labels[j]);
  }
  Shape sum_shape;
  for (auto [i, j] : shared) sum_shape.push_back(a.tensor.shape()[i]);

  const Count out_count = element_count(out_shape);
  if (out_count > kOracleElementLimit) {
    throw std::length_error("oracle guard exceeded: intermediate of " + std::to_string(out_count) +
                            " elements");
  }
  const Count sum_count = element_count(sum_shape);

  std::vector<double> out(out_count, 0.0);
  std::vector<std::size_t> oi(out_shape.size(), 0), si(sum_shape.size(), 0);
  std::vector<std::size_t> ia(a.tensor.rank()), ib(b.tensor.rank());
  for (Count o = 0; o < out_count; ++o) {
    for (std::size_t k = 0; k < free_a.size(); ++k) ia[free_a[k]] = oi[k];
    for (std::size_t k = 0; k < free_b.size(); ++k) ib[free_b[k]] = oi[free_a.size() + k];
    std::fill(si.begin(), si.end(), 0);
    double acc = 0.0;
    for (Count s = 0; s < sum_count; ++s) {
      for (std::size_t k = 0; k < shared.size(); ++k) {
        ia[shared[k].first] = si[k];
        ib[shared[k].second] = si[k];
      }
      acc += a.tensor.at(ia) * b.tensor.at(ib);
      for (std::size_t k = si.size(); k-- > 0;) {
        if (++si[k] < sum_shape[k]) break;
        si[k] = 0;
      }
    }
    out[o] = acc;
    for (std::size_t k = oi.size(); k-- > 0;) {
      if (++oi[k] < out_shape[k]) break;
      oi[k] = 0;
    }
  }
  return {Tensor(std::move(out_shape), std::move(out)), std::move(out_labels)};
}

}  // namespace detail

/// Contracts the network bond by bond in bond-id order, ignoring cost.
/// Throws std::length_error if an intermediate would exceed
/// kOracleElementLimit elements.
inline double naive_value_oracle(const TensorNetwork& net) {
  constexpr std::size_t kUnbonded = static_cast<std::size_t>(-1);
  std::vector<detail::LabeledTensor> pieces;
  std::vector<std::size_t> owner(net.nodes().size());
  for (const auto& node : net.nodes()) {
    owner[node.id] = pieces.size();
    pieces.push_back({node.tensor, std::vector<std::size_t>(node.tensor.rank(), kUnbonded)});
  }
  for (std::size_t bid = 0; bid < net.bonds().size(); ++bid) {
    const auto& bond = net.bonds()[bid];
    pieces[owner[bond.a.node]].labels[bond.a.axis] = bid;
    pieces[owner[bond.b.node]].labels[bond.b.axis] = bid;
  }
  for (const auto& piece : pieces) {
    if (std::find(piece.labels.begin(), piece.labels.end(), kUnbonded) != piece.labels.end()) {
      throw std::invalid_argument("network has a dangling axis; it does not reduce to a scalar");
    }
  }

  std::vector<bool> alive(pieces.size(), true);
  for (const auto& bond : net.bonds()) {
    const std::size_t pa = owner[bond.a.node], pb = owner[bond.b.node];
    if (pa == pb) continue;  // already summed with an earlier bond between the same pieces
    pieces.push_back(detail::naive_contract(pieces[pa], pieces[pb]));
    alive.push_back(true);
    alive[pa] = alive[pb] = false;
    pieces[pa].tensor = Tensor();
    pieces[pb].tensor = Tensor();
    const std::size_t merged = pieces.size() - 1;
    for (auto& o : owner)
      if (o == pa || o == pb) o = merged;
  }

  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!alive[i]) continue;
    if (last) throw std::invalid_argument("network is disconnected");
    last = i;
  }
  return pieces[*last].tensor.value();
}

}  // namespace combtn
