#pragma once

#include <cstdint>
#include <vector>

#include "lindyna/sparse_vec.hpp"

namespace lindyna {

inline constexpr int kBoyanStateCount = 99;   // states 0..98, 0 terminal
inline constexpr int kBoyanStartState = 98;
inline constexpr int kBoyanFeatureDim = 25;

/// Piecewise-linear interpolation features for the chain: anchors at states
/// 2, 6, ..., 98 with width 4, so feature i is max(0, 1 - |s - (4i+2)|/4).
/// At most two entries, values in [0, 1], summing to 1 for 2 <= s <= 98; the
/// two pre-anchor states carry a single partial-weight entry.
SparseVec boyan_features(int state);

struct TileCoderConfig {
  int tilings = 10;
  int grid = 8;           // cells per dimension per tiling
  int hash_dim = 10000;   // feature-vector dimension after hashing
  std::uint64_t seed = 0;
  double x_lo = -1.2, x_hi = 0.5;
  double y_lo = -0.07, y_hi = 0.07;
};

/// Hashed coarse coding over a 2-d box. Each tiling is a uniform
/// grid x grid lattice; tiling k is offset by (k / tilings) of a tile width in
/// both dimensions. Active tiles hash to indices below hash_dim with a seeded
/// integer hash; duplicate hashed indices collapse to a single value-1 entry.
/// Read-only after construction; safe to share across threads.
class TileCoder {
 public:
  struct Cell {
    int tiling, xi, yi;
    friend bool operator==(const Cell& a, const Cell& b) = default;
  };

  explicit TileCoder(TileCoderConfig cfg = {});

  int dim() const { return cfg_.hash_dim; }
  const TileCoderConfig& config() const { return cfg_; }

  /// Binary feature vector for an in-bounds (position, velocity) pair.
  SparseVec encode(double x, double y) const;

  /// The lattice cells encode() hashes, one per tiling.
  std::vector<Cell> active_cells(double x, double y) const;

  /// Hashed feature index of one cell.
  int hash_cell(const Cell& c) const;

 private:
  TileCoderConfig cfg_;
};

}  // namespace lindyna
