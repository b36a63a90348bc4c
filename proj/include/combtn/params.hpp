#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace combtn {

enum class Geometry { Mps, Comb };

inline const char* to_string(Geometry g) { return g == Geometry::Mps ? "mps" : "comb"; }

/// Dimensions shared by both geometries. A chain has teeth * tooth_length
/// sites; a comb has `teeth` backbone tensors, each carrying a tooth of
/// `tooth_length` site tensors.
struct NetworkParams {
  std::size_t raw_dim = 1;         // D, raw data dimension before compression
  std::size_t compressed_dim = 1;  // d, physical leg after compression
  std::size_t bond_dim = 1;        // x
  std::size_t teeth = 2;           // M
  std::size_t tooth_length = 1;    // N

  std::size_t sites() const { return teeth * tooth_length; }

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const {
    if (raw_dim < 1) throw std::invalid_argument("D (raw dimension) must be >= 1");
    if (compressed_dim < 1) throw std::invalid_argument("d (compressed dimension) must be >= 1");
    if (bond_dim < 1) throw std::invalid_argument("x (bond dimension) must be >= 1");
    if (tooth_length < 1) throw std::invalid_argument("N (tooth length) must be >= 1");
    if (teeth < 2) throw std::invalid_argument("M (teeth) must be >= 2");
    if (compressed_dim > raw_dim) {
      throw std::invalid_argument("d <= D violated: compressed dimension " +
                                  std::to_string(compressed_dim) + " exceeds raw dimension " +
                                  std::to_string(raw_dim));
    }
  }

  std::string to_string() const {
    return "(N=" + std::to_string(tooth_length) + ", M=" + std::to_string(teeth) +
           ", D=" + std::to_string(raw_dim) + ", d=" + std::to_string(compressed_dim) +
           ", x=" + std::to_string(bond_dim) + ")";
  }

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

}  // namespace combtn
