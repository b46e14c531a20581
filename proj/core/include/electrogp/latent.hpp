#pragma once

#include <span>
#include <vector>

namespace electrogp {

// Latent coordinates, one per observation, pairwise distinct inside (0,1).
class LatentConfig {
 public:
  LatentConfig() = default;
  // Throws ValidationError on out-of-range or repeated values.
  explicit LatentConfig(std::vector<double> xs);

  std::span<const double> values() const noexcept { return xs_; }
  const std::vector<double>& vector() const noexcept { return xs_; }
  std::size_t size() const noexcept { return xs_.size(); }
  double operator[](std::size_t i) const { return xs_[i]; }

 private:
  std::vector<double> xs_;
};

// Ranks of xs (0 = smallest). Ties keep input order.
std::vector<std::size_t> rank_order(std::span<const double> xs);

// Largest gap between sorted coordinates on the circle (wraparound included).
double max_wraparound_gap(std::span<const double> xs);

}  // namespace electrogp
