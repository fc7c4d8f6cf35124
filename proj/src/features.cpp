#include "lindyna/features.hpp"

#include <cmath>

namespace lindyna {

SparseVec boyan_features(int state) {
  if (state < 0 || state >= kBoyanStateCount)
    throw ContractViolation("boyan_features: state out of range");
  std::vector<Entry> entries;
  // anchors at 2, 6, ..., 98: the start state coincides with the last anchor,
  // which keeps the linear stretch of the true values representable
  for (int i = 0; i < kBoyanFeatureDim; ++i) {
    const double v = 1.0 - std::abs(state - (4 * i + 2)) / 4.0;
    if (v > 0.0) entries.push_back({i, v});
  }
  return SparseVec::from_entries(kBoyanFeatureDim, std::move(entries));
}

TileCoder::TileCoder(TileCoderConfig cfg) : cfg_(cfg) {
  if (cfg_.tilings <= 0 || cfg_.grid <= 0 || cfg_.hash_dim <= 0)
    throw ContractViolation("TileCoder: non-positive configuration");
  if (cfg_.x_hi <= cfg_.x_lo || cfg_.y_hi <= cfg_.y_lo)
    throw ContractViolation("TileCoder: empty bounding box");
}

std::vector<TileCoder::Cell> TileCoder::active_cells(double x, double y) const {
  if (x < cfg_.x_lo || x > cfg_.x_hi || y < cfg_.y_lo || y > cfg_.y_hi)
    throw ContractViolation("TileCoder: point outside bounding box");
  const double wx = (cfg_.x_hi - cfg_.x_lo) / cfg_.grid;
  const double wy = (cfg_.y_hi - cfg_.y_lo) / cfg_.grid;
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(cfg_.tilings));
  for (int k = 0; k < cfg_.tilings; ++k) {
    const double off = static_cast<double>(k) / cfg_.tilings;
    // Shift the lattice origin back by off * width: indices stay >= 0.
    const int xi = static_cast<int>(std::floor((x - cfg_.x_lo) / wx + off));
    const int yi = static_cast<int>(std::floor((y - cfg_.y_lo) / wy + off));
    cells.push_back({k, xi, yi});
  }
  return cells;
}

int TileCoder::hash_cell(const Cell& c) const {
  std::uint64_t z = cfg_.seed;
  for (std::uint64_t part : {static_cast<std::uint64_t>(c.tiling),
                             static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.xi)),
                             static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.yi))}) {
    z ^= part + 0x9e3779b97f4a7c15ULL + (z << 6) + (z >> 2);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
  }
  return static_cast<int>(z % static_cast<std::uint64_t>(cfg_.hash_dim));
}

SparseVec TileCoder::encode(double x, double y) const {
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(cfg_.tilings));
  for (const Cell& c : active_cells(x, y)) entries.push_back({hash_cell(c), 1.0});
  // Collisions within one state's active set collapse to a single 1.
  auto v = SparseVec::from_unsorted(cfg_.hash_dim, std::move(entries));
  std::vector<Entry> dedup = v.entries();
  for (Entry& e : dedup) e.value = 1.0;
  return SparseVec::from_entries(cfg_.hash_dim, std::move(dedup));
}

}  // namespace lindyna
