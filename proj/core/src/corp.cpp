#include "electrogp/corp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "electrogp/error.hpp"

namespace electrogp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// Golden-section search for the maximum of a unimodal function on (lo, hi).
template <typename F>
double golden_max(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

void CorpConfig::validate() const {
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("corp: r must be positive");
  if (quad_points < 64) throw ValidationError("corp: quad_points must be at least 64");
  if (!(envelope_headroom >= 1.0)) throw ValidationError("corp: envelope headroom must be >= 1");
  if (!(mode_tolerance > 0.0)) throw ValidationError("corp: mode tolerance must be positive");
  if (max_rejections < 1) throw ValidationError("corp: max_rejections must be positive");
}

double validate_coordinate(double x) {
  if (!(x > 0.0 && x < 1.0)) {
    std::ostringstream msg;
    msg << "coordinate " << x << " is outside (0,1)";
    throw ValidationError(msg.str());
  }
  return std::clamp(x, kCoordClamp, 1.0 - kCoordClamp);
}

PointSet1D PointSet1D::from_unsorted(std::vector<double> xs) {
  for (double& x : xs) x = validate_coordinate(x);
  std::sort(xs.begin(), xs.end());
  if (std::adjacent_find(xs.begin(), xs.end()) != xs.end())
    throw ValidationError("point set contains tied coordinates");
  return PointSet1D(std::move(xs));
}

double sine_distance(double x, double y) {
  double d = std::abs(x - y);
  d -= std::floor(d);
  return std::sin(kPi * std::min(d, 1.0 - d));
}

double joint_log_density(std::span<const double> xs, const CorpConfig& cfg) {
  if (xs.empty()) throw ValidationError("joint_log_density: empty point set");
  std::vector<double> v(xs.size());
  std::transform(xs.begin(), xs.end(), v.begin(), validate_coordinate);
  double sum = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double s = sine_distance(v[i], v[j]);
      if (s <= 0.0) return kNegInf;
      sum += std::log(s);
    }
  }
  return 2.0 * cfg.r * sum;
}

double conditional_log_density(double x_new, std::span<const double> existing,
                               const CorpConfig& cfg) {
  if (existing.empty()) throw ValidationError("conditional_log_density: no existing points");
  const double x = validate_coordinate(x_new);
  double sum = 0.0;
  for (double e : existing) {
    const double s = sine_distance(x, validate_coordinate(e));
    if (s <= 0.0) return kNegInf;
    sum += std::log(s);
  }
  return 2.0 * cfg.r * sum;
}

std::vector<double> joint_log_density_gradient(std::span<const double> xs, const CorpConfig& cfg) {
  std::vector<double> grad(xs.size(), 0.0);
  const double scale = 2.0 * cfg.r * kPi;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const double a = kPi * (xs[i] - xs[j]);
      const double cot = std::cos(a) / std::sin(a);
      grad[i] += scale * cot;
      grad[j] -= scale * cot;
    }
  }
  return grad;
}

ConditionalSampler::ConditionalSampler(std::span<const double> existing, const CorpConfig& cfg)
    : existing_(existing.begin(), existing.end()), cfg_(cfg) {
  cfg_.validate();
  for (double& x : existing_) x = validate_coordinate(x);
  std::sort(existing_.begin(), existing_.end());
  if (existing_.empty()) {
    gaps_.push_back({0.0, 1.0, 0.5, 0.0, 1.0});
    cumulative_ = {1.0};
    return;
  }

  const std::size_t m = existing_.size();
  for (std::size_t k = 0; k + 1 < m; ++k) {
    if (existing_[k + 1] > existing_[k]) gaps_.push_back({existing_[k], existing_[k + 1]});
  }
  gaps_.push_back({existing_.back(), existing_.front() + 1.0});

  auto f = [this](double u) { return log_density(u); };
  double ref = kNegInf;
  for (Gap& g : gaps_) {
    g.mode = golden_max(f, g.lo, g.hi, cfg_.mode_tolerance);
    g.log_mode_height = f(g.mode);
    ref = std::max(ref, g.log_mode_height);
  }

  if (gaps_.size() == 1) {
    gaps_.front().mass = 1.0;
  } else {
    double total = 0.0;
    for (Gap& g : gaps_) {
      const double width = g.hi - g.lo;
      const auto intervals = static_cast<std::size_t>(
          std::max(16.0, std::ceil(cfg_.quad_points * width)));
      const double h = width / static_cast<double>(intervals);
      // Endpoints are zeros of the density.
      double integral = 0.0;
      for (std::size_t q = 1; q < intervals; ++q)
        integral += std::exp(f(g.lo + h * static_cast<double>(q)) - ref);
      g.mass = integral * h;
      total += g.mass;
    }
    for (Gap& g : gaps_) g.mass /= total;
  }

  double acc = 0.0;
  for (const Gap& g : gaps_) {
    acc += g.mass;
    cumulative_.push_back(acc);
  }
  cumulative_.back() = 1.0;
}

double ConditionalSampler::log_density(double u) const {
  double sum = 0.0;
  for (double e : existing_) {
    const double s = sine_distance(u, e);
    if (s <= 0.0) return kNegInf;
    sum += std::log(s);
  }
  return 2.0 * cfg_.r * sum;
}

double ConditionalSampler::draw(Rng& rng) const {
  if (existing_.empty()) return uniform_open(rng);

  const double pick = uniform_open(rng);
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), pick);
  const Gap& gap = gaps_[static_cast<std::size_t>(it - cumulative_.begin())];
  const double width = gap.hi - gap.lo;
  const double ceiling = gap.log_mode_height + std::log(cfg_.envelope_headroom);

  for (long attempt = 0; attempt < cfg_.max_rejections; ++attempt) {
    const double u = gap.lo + width * uniform_open(rng);
    const double accept = std::log(uniform_open(rng));
    if (accept < log_density(u) - ceiling) {
      const double x = u - std::floor(u);
      if (x > 0.0 && x < 1.0) return std::clamp(x, kCoordClamp, 1.0 - kCoordClamp);
    }
  }

  // Expected acceptance of the envelope on this gap, for the diagnostic.
  const std::size_t nodes = 4096;
  double integral = 0.0;
  for (std::size_t q = 1; q < nodes; ++q)
    integral += std::exp(log_density(gap.lo + width * static_cast<double>(q) / nodes) - ceiling);
  const double rate = integral / static_cast<double>(nodes);
  std::ostringstream msg;
  msg << "corp sampler: " << cfg_.max_rejections << " rejections on gap (" << gap.lo << ", "
      << gap.hi << "); estimated acceptance rate " << rate;
  throw NumericalError(msg.str());
}

std::vector<double> sample_sequence(std::size_t n, const CorpConfig& cfg, Rng& rng) {
  if (n == 0) throw ValidationError("sample: n must be at least 1");
  cfg.validate();
  std::vector<double> draws;
  draws.reserve(n);
  draws.push_back(std::clamp(uniform_open(rng), kCoordClamp, 1.0 - kCoordClamp));
  while (draws.size() < n) {
    ConditionalSampler sampler(draws, cfg);
    draws.push_back(sampler.draw(rng));
  }
  return draws;
}

PointSet1D sample(std::size_t n, const CorpConfig& cfg, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return PointSet1D::from_unsorted(sample_sequence(n, cfg, rng));
}

std::vector<double> spherical_to_cartesian(std::span<const double> x) {
  if (x.empty()) throw ValidationError("spherical_to_cartesian: need p >= 1");
  std::vector<double> y(x.size() + 1);
  double running = 1.0;
  for (std::size_t m = 0; m < x.size(); ++m) {
    const double angle = 2.0 * kPi * validate_coordinate(x[m]);
    y[m] = running * std::cos(angle);
    running *= std::sin(angle);
  }
  y.back() = running;
  return y;
}

double multivariate_conditional_log_density(std::span<const double> x_new,
                                            const std::vector<std::vector<double>>& existing,
                                            const CorpConfig& cfg) {
  const std::vector<double> y = spherical_to_cartesian(x_new);
  double sum = 0.0;
  for (const auto& e : existing) {
    if (e.size() != x_new.size())
      throw ValidationError("multivariate corp: dimension mismatch between points");
    const std::vector<double> ye = spherical_to_cartesian(e);
    double sq = 0.0;
    for (std::size_t m = 0; m < y.size(); ++m) sq += (y[m] - ye[m]) * (y[m] - ye[m]);
    if (sq <= 0.0) return kNegInf;
    sum += std::log(sq);
  }
  return cfg.r * sum;
}

}  // namespace electrogp
