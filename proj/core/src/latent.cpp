#include "electrogp/latent.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "electrogp/error.hpp"

namespace electrogp {

LatentConfig::LatentConfig(std::vector<double> xs) : xs_(std::move(xs)) {
  for (double x : xs_) {
    if (!(x > 0.0 && x < 1.0)) {
      std::ostringstream msg;
      msg << "latent coordinate " << x << " is outside (0,1)";
      throw ValidationError(msg.str());
    }
  }
  std::vector<double> sorted = xs_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("latent coordinates must be pairwise distinct");
}

std::vector<std::size_t> rank_order(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<std::size_t> ranks(xs.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = r;
  return ranks;
}

double max_wraparound_gap(std::span<const double> xs) {
  if (xs.empty()) return 1.0;
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  double gap = 1.0 - sorted.back() + sorted.front();
  for (std::size_t i = 1; i < sorted.size(); ++i) gap = std::max(gap, sorted[i] - sorted[i - 1]);
  return gap;
}

}  // namespace electrogp
