#pragma once

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "combtn/commands.hpp"

namespace combtn::cli {

namespace detail {

inline void add_network_flags(CLI::App& app, NetworkParams& p, bool with_bond) {
  app.add_option("--teeth,-M", p.teeth, "number of teeth M (>= 2)")->required();
  app.add_option("--tooth-len,-N", p.tooth_length, "tooth length N (>= 1)")->required();
  app.add_option("--dim-raw,-D", p.raw_dim, "raw data dimension D")->required();
  app.add_option("--dim-comp,-d", p.compressed_dim, "compressed physical dimension d (<= D)")->required();
  if (with_bond) app.add_option("--bond,-x", p.bond_dim, "bond dimension x")->required();
}

}  // namespace detail

/// Parses argv and dispatches to a subcommand; returns the exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Contraction cost laboratory for compression-layer MPS and comb tensor networks"};
  app.require_subcommand(1);

  const std::map<std::string, Basis> basis_map{{"schedule", Basis::Schedule}, {"printed", Basis::Printed}};
  const std::map<std::string, Geometry> kind_map{{"mps", Geometry::Mps}, {"comb", Geometry::Comb}};

  CostOptions cost;
  auto* cost_cmd = app.add_subcommand("cost", "closed-form contraction counts and their difference");
  detail::add_network_flags(*cost_cmd, cost.params, true);
  cost_cmd->add_option("--basis", cost.basis, "comb formula for delta C: schedule (default) or printed")
      ->transform(CLI::CheckedTransformer(basis_map, CLI::ignore_case));

  ThresholdOptions threshold;
  auto* threshold_cmd = app.add_subcommand("threshold", "bond-dimension window where the comb is cheaper");
  threshold_cmd->add_option("--teeth,-M", threshold.teeth, "number of teeth M (>= 2)")->required();
  threshold_cmd->add_option("--dim-comp,-d", threshold.d, "compressed physical dimension d (> 0, may be real)")
      ->required();
  threshold_cmd->add_flag("--json", threshold.json, "emit a JSON object");

  SweepOptions sweep;
  std::string sweep_svg;
  auto* sweep_cmd = app.add_subcommand("sweep", "threshold roots over a range of d, as CSV and optional SVG");
  sweep_cmd->add_option("--teeth,-M", sweep.teeth, "number of teeth M (>= 2)")->required();
  sweep_cmd->add_option("--d-min", sweep.d_min, "first d")->capture_default_str();
  sweep_cmd->add_option("--d-max", sweep.d_max, "last d")->capture_default_str();
  sweep_cmd->add_option("--step", sweep.step, "d increment")->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out_csv, "CSV output path")->required();
  auto* svg_opt = sweep_cmd->add_option("--svg", sweep_svg, "SVG chart output path");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "check closed forms against instrumented contraction");
  verify_cmd->add_option("--grid", verify.grid, "small or full")
      ->check(CLI::IsMember({"small", "full"}))
      ->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed, "tensor seed")->capture_default_str();

  ContractOptions contract;
  std::string data_path;
  auto* contract_cmd = app.add_subcommand("contract", "build a network and contract it with cost counting");
  contract_cmd->add_option("--kind", contract.kind, "mps or comb")
      ->required()
      ->transform(CLI::CheckedTransformer(kind_map, CLI::ignore_case));
  detail::add_network_flags(*contract_cmd, contract.params, true);
  contract_cmd->add_option("--seed", contract.seed, "tensor seed")->capture_default_str();
  auto* data_opt = contract_cmd->add_option("--data", data_path, "data matrix CSV (M*N rows, D columns)");
  contract_cmd->add_flag("--orthonormal-u", contract.orthonormal_u, "use isometric compression matrices");
  contract_cmd->add_flag("--json", contract.json, "emit a JSON object");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "wall-clock timing of both schedules over bond dimensions");
  detail::add_network_flags(*bench_cmd, bench.params, false);
  bench_cmd->add_option("--bond-list", bench.bonds, "comma-separated bond dimensions")
      ->required()
      ->delimiter(',');
  bench_cmd->add_option("--reps", bench.reps, "repetitions per row (>= 3)")->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "tensor seed")->capture_default_str();
  bench_cmd->add_option("--out", bench.out_csv, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*cost_cmd) return cmd_cost(cost, out, err);
  if (*threshold_cmd) return cmd_threshold(threshold, out, err);
  if (*sweep_cmd) {
    if (*svg_opt) sweep.out_svg = sweep_svg;
    return cmd_sweep(sweep, out, err);
  }
  if (*verify_cmd) return cmd_verify(verify, out, err);
  if (*contract_cmd) {
    if (*data_opt) contract.data_path = data_path;
    return cmd_contract(contract, out, err);
  }
  if (*bench_cmd) return cmd_bench(bench, out, err);
  return kExitUsage;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"combtn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace combtn::cli
