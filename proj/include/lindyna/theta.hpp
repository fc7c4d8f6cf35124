#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "lindyna/errors.hpp"
#include "lindyna/sparse_vec.hpp"

namespace lindyna {

/// Dense value-function parameter vector. Entries are kept finite; the update
/// rules in planners.hpp trip a DivergenceError before a non-finite or
/// runaway value can poison downstream statistics.
class Theta {
 public:
  Theta() = default;
  explicit Theta(int dim) : v_(static_cast<std::size_t>(dim), 0.0) {}

  int dim() const { return static_cast<int>(v_.size()); }
  double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const { return v_; }
  std::vector<double>& raw() { return v_; }
  const std::vector<double>& raw() const { return v_; }

  double dot(const SparseVec& phi) const {
    if (phi.dim() != dim()) throw ContractViolation("Theta::dot: dimension mismatch");
    double sum = 0.0;
    for (const Entry& e : phi.entries()) sum += v_[static_cast<std::size_t>(e.index)] * e.value;
    return sum;
  }

  /// theta += scale * phi. Returns largest magnitude among touched entries;
  /// NaN propagates so callers can trip the divergence guard.
  double axpy(double scale, const SparseVec& phi) {
    if (phi.dim() != dim()) throw ContractViolation("Theta::axpy: dimension mismatch");
    double worst = 0.0;
    for (const Entry& e : phi.entries()) {
      double& x = v_[static_cast<std::size_t>(e.index)];
      x += scale * e.value;
      const double mag = std::abs(x);
      if (!(mag <= worst)) worst = mag;
    }
    return worst;
  }

  friend bool operator==(const Theta& a, const Theta& b) { return a.v_ == b.v_; }

 private:
  std::vector<double> v_;
};

}  // namespace lindyna
