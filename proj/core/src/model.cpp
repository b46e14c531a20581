#include "electrogp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "electrogp/error.hpp"
#include "electrogp/parallel.hpp"

namespace electrogp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, j);
  return out;
}

bool feasible_latent(std::span<const double> latent) {
  return std::all_of(latent.begin(), latent.end(), [](double x) { return x > 0.0 && x < 1.0; });
}

bool above_noise_floor(const KernelParams& p) {
  return p.log_sigma2 >= p.log_phi + std::log(kNoiseFloor);
}

template <typename Error>
[[noreturn]] void rethrow_with_stage(const Error& e, const char* stage) {
  throw Error(std::string("fit ") + stage + ": " + e.what());
}

}  // namespace

Eigen::VectorXd pack(const HyperParams& theta, std::span<const double> latent) {
  const auto d = static_cast<Eigen::Index>(theta.size());
  Eigen::VectorXd v(3 * d + static_cast<Eigen::Index>(latent.size()));
  for (Eigen::Index j = 0; j < d; ++j) {
    v[3 * j] = theta.dims[j].log_phi;
    v[3 * j + 1] = theta.dims[j].log_alpha;
    v[3 * j + 2] = theta.dims[j].log_sigma2;
  }
  for (std::size_t i = 0; i < latent.size(); ++i) v[3 * d + static_cast<Eigen::Index>(i)] = latent[i];
  return v;
}

void unpack(const Eigen::VectorXd& v, std::size_t d, HyperParams& theta,
            std::vector<double>& latent) {
  const auto dd = static_cast<Eigen::Index>(d);
  if (v.size() < 3 * dd) throw ValidationError("unpack: parameter vector too short");
  theta.dims.resize(d);
  for (Eigen::Index j = 0; j < dd; ++j)
    theta.dims[j] = {v[3 * j], v[3 * j + 1], v[3 * j + 2]};
  latent.assign(v.data() + 3 * dd, v.data() + v.size());
}

namespace {

double evaluate(std::span<const double> latent, const HyperParams& theta,
                const Eigen::MatrixXd& data, const CorpConfig& corp, ObjectiveOptions options,
                Eigen::VectorXd* grad) {
  const std::size_t n = latent.size();
  const std::size_t d = theta.size();
  if (static_cast<std::size_t>(data.rows()) != n || static_cast<std::size_t>(data.cols()) != d)
    throw ValidationError("objective: data shape does not match latent/hyperparameter sizes");
  if (grad) grad->setZero(static_cast<Eigen::Index>(3 * d + n));

  if (!feasible_latent(latent)) return kNegInf;
  for (const KernelParams& p : theta.dims)
    if (!p.finite() || !above_noise_floor(p)) return kNegInf;

  double prior = 0.0;
  if (options.include_prior && n > 0) {
    prior = joint_log_density(latent, corp);
    if (!std::isfinite(prior)) return kNegInf;
  }

  std::vector<double> lml(d, 0.0);
  std::vector<LmlGradient> grads(grad ? d : 0);
  std::vector<char> failed(d, 0);
  const std::vector<double> xs(latent.begin(), latent.end());
  parallel_for(d, [&](std::size_t j) {
    try {
      GPDim dim(xs, column(data, static_cast<Eigen::Index>(j)), theta.dims[j]);
      lml[j] = dim.log_marginal_likelihood();
      if (grad) grads[j] = dim.grad_log_marginal();
    } catch (const NumericalError&) {
      failed[j] = 1;
    }
  });
  if (std::any_of(failed.begin(), failed.end(), [](char f) { return f != 0; })) return kNegInf;

  double value = prior;
  for (double v : lml) value += v;
  if (!std::isfinite(value)) return kNegInf;

  if (grad) {
    auto& g = *grad;
    const auto offset = static_cast<Eigen::Index>(3 * d);
    for (std::size_t j = 0; j < d; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      g[3 * jj] = grads[j].d_log_phi;
      g[3 * jj + 1] = grads[j].d_log_alpha;
      g[3 * jj + 2] = grads[j].d_log_sigma2;
      g.segment(offset, static_cast<Eigen::Index>(n)) += grads[j].d_x;
    }
    if (options.include_prior && n > 0) {
      const std::vector<double> prior_grad = joint_log_density_gradient(latent, corp);
      for (std::size_t i = 0; i < n; ++i) g[offset + static_cast<Eigen::Index>(i)] += prior_grad[i];
    }
  }
  return value;
}

}  // namespace

ObjectiveValue objective(std::span<const double> latent, const HyperParams& theta,
                         const Eigen::MatrixXd& data, const CorpConfig& corp,
                         ObjectiveOptions options) {
  ObjectiveValue out;
  out.value = evaluate(latent, theta, data, corp, options, &out.gradient);
  return out;
}

double objective_packed(const Eigen::VectorXd& v, Eigen::VectorXd* grad,
                        const Eigen::MatrixXd& data, const CorpConfig& corp,
                        ObjectiveOptions options) {
  HyperParams theta;
  std::vector<double> latent;
  unpack(v, static_cast<std::size_t>(data.cols()), theta, latent);
  return evaluate(latent, theta, data, corp, options, grad);
}

FittedModel::FittedModel(Eigen::MatrixXd data, LatentConfig latent, HyperParams theta,
                         CorpConfig corp, std::vector<double> centering, bool include_prior)
    : data_(std::move(data)),
      latent_(std::move(latent)),
      theta_(std::move(theta)),
      corp_(corp),
      centering_(std::move(centering)),
      include_prior_(include_prior) {
  corp_.validate();
  const std::size_t d = static_cast<std::size_t>(data_.cols());
  if (theta_.size() != d) throw ValidationError("model: hyperparameter count does not match data");
  if (latent_.size() != static_cast<std::size_t>(data_.rows()))
    throw ValidationError("model: latent count does not match data rows");
  if (centering_.empty()) centering_.assign(d, 0.0);
  if (centering_.size() != d) throw ValidationError("model: centering length does not match data");

  Eigen::MatrixXd centered = data_;
  for (std::size_t j = 0; j < d; ++j) centered.col(static_cast<Eigen::Index>(j)).array() -= centering_[j];

  per_dim_.resize(d);
  for (std::size_t j = 0; j < d; ++j)
    per_dim_[j] = GPDim(latent_.vector(), column(centered, static_cast<Eigen::Index>(j)), theta_.dims[j]);
  objective_ = evaluate(latent_.values(), theta_, centered, corp_, {include_prior_}, nullptr);
}

HyperParams initial_hyperparams(const Eigen::MatrixXd& centered, std::span<const double> latent) {
  std::vector<double> dists;
  dists.reserve(latent.size() * (latent.size() - 1) / 2);
  for (std::size_t i = 0; i < latent.size(); ++i)
    for (std::size_t j = i + 1; j < latent.size(); ++j) dists.push_back(std::abs(latent[i] - latent[j]));
  double median = 0.5;
  if (!dists.empty()) {
    const auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    median = *mid;
    if (dists.size() % 2 == 0) {
      median = 0.5 * (median + *std::max_element(dists.begin(), mid));
    }
  }
  const double alpha = 1.0 / (2.0 * median * median);

  HyperParams theta;
  for (Eigen::Index j = 0; j < centered.cols(); ++j) {
    const auto col = centered.col(j).array();
    double phi = (col - col.mean()).square().mean();
    if (!(phi > 0.0)) phi = 1e-12;
    theta.dims.push_back(KernelParams::natural(phi, alpha, 0.1 * phi));
  }
  return theta;
}

namespace {

LatentConfig start_from(const std::vector<double>& coords, bool rank_init) {
  if (!rank_init) return rescale_unit(coords);
  const std::vector<std::size_t> ranks = rank_order(coords);
  return rescale_unit(std::vector<double>(ranks.begin(), ranks.end()));
}

}  // namespace

FittedModel fit(const Eigen::MatrixXd& data, const FitSettings& settings) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  if (n < 3) throw ValidationError("fit: need at least 3 observations");
  if (d < 1) throw ValidationError("fit: need at least one output dimension");
  if (!data.allFinite()) throw ValidationError("fit: data contains non-finite values");
  settings.corp.validate();
  settings.scg.validate();

  std::vector<double> centering(static_cast<std::size_t>(d), 0.0);
  if (settings.center)
    for (Eigen::Index j = 0; j < d; ++j) centering[static_cast<std::size_t>(j)] = data.col(j).mean();
  Eigen::MatrixXd centered = data;
  for (Eigen::Index j = 0; j < d; ++j) centered.col(j).array() -= centering[static_cast<std::size_t>(j)];

  // Stage 1: initial latent coordinates.
  LatentConfig x0;
  try {
    if (settings.initial_latent) {
      if (settings.initial_latent->size() != static_cast<std::size_t>(n))
        throw ValidationError("initial latent length does not match data rows");
      x0 = start_from(*settings.initial_latent, settings.rank_init);
    } else {
      LleSettings lle = settings.lle;
      lle.k_neighbors = std::min<int>(lle.k_neighbors, static_cast<int>(n - 1));
      x0 = start_from(lle_1d(centered, lle), settings.rank_init);
    }
  } catch (const ValidationError& e) {
    rethrow_with_stage(e, "stage 1 (embedding)");
  } catch (const NumericalError& e) {
    rethrow_with_stage(e, "stage 1 (embedding)");
  }

  const ObjectiveOptions options{settings.include_prior};
  HyperParams theta = initial_hyperparams(centered, x0.values());
  StageReport report;
  report.initial = evaluate(x0.values(), theta, centered, settings.corp, options, nullptr);

  // Stage 2: hyperparameters at fixed x0.
  try {
    const std::vector<double> fixed = x0.vector();
    Objective hyper = [&](const Eigen::VectorXd& v, Eigen::VectorXd* g) {
      HyperParams t;
      std::vector<double> unused;
      unpack(v, static_cast<std::size_t>(d), t, unused);
      if (!g) return evaluate(fixed, t, centered, settings.corp, options, nullptr);
      Eigen::VectorXd full;
      const double value = evaluate(fixed, t, centered, settings.corp, options, &full);
      *g = full.head(3 * d);
      return value;
    };
    const ScgResult stage2 = maximize(hyper, pack(theta, {}), settings.scg);
    std::vector<double> unused;
    unpack(stage2.x, static_cast<std::size_t>(d), theta, unused);
    report.hyper_only = stage2.value;
    report.hyper_iterations = stage2.iterations;
  } catch (const ValidationError& e) {
    rethrow_with_stage(e, "stage 2 (hyperparameters)");
  } catch (const NumericalError& e) {
    rethrow_with_stage(e, "stage 2 (hyperparameters)");
  }

  // Stage 3: joint latent + hyperparameter fit. With the prior on, steps that
  // reorder the latents are rejected along with coincident ones.
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x0[a] < x0[b]; });
  std::vector<double> latent;
  try {
    Objective joint = [&](const Eigen::VectorXd& v, Eigen::VectorXd* g) {
      HyperParams t;
      std::vector<double> xs;
      unpack(v, static_cast<std::size_t>(d), t, xs);
      if (settings.include_prior) {
        for (std::size_t k = 1; k < order.size(); ++k) {
          if (!(xs[order[k - 1]] < xs[order[k]])) {
            if (g) g->setZero(v.size());
            return kNegInf;
          }
        }
      }
      return evaluate(xs, t, centered, settings.corp, options, g);
    };
    const ScgResult stage3 = maximize(joint, pack(theta, x0.values()), settings.scg);
    unpack(stage3.x, static_cast<std::size_t>(d), theta, latent);
    report.final = stage3.value;
    report.joint_iterations = stage3.iterations;
  } catch (const ValidationError& e) {
    rethrow_with_stage(e, "stage 3 (joint)");
  } catch (const NumericalError& e) {
    rethrow_with_stage(e, "stage 3 (joint)");
  }

  FittedModel model(data, LatentConfig(std::move(latent)), std::move(theta), settings.corp,
                    std::move(centering), settings.include_prior);
  model.stages = report;
  return model;
}

}  // namespace electrogp
