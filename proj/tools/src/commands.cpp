#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "electrogp/corp.hpp"
#include "electrogp/error.hpp"
#include "electrogp/inference.hpp"
#include "electrogp/io.hpp"
#include "electrogp/model.hpp"
#include "electrogp/parallel.hpp"
#include "electrogp/synthetic.hpp"
#include "svg.hpp"

namespace electrogp::cli {
namespace fs = std::filesystem;

namespace {

void require_input(const std::string& path, const char* what) {
  if (path.empty()) throw ValidationError(std::string("missing ") + what + " path");
  if (!fs::is_regular_file(path)) throw ValidationError(std::string(what) + " file not found: " + path);
}

void require_output(const std::string& path, const char* what) {
  if (path.empty()) throw ValidationError(std::string("missing ") + what + " path");
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    throw ValidationError(std::string(what) + " directory does not exist: " + parent.string());
}

Eigen::MatrixXd load_training(const std::string& path) {
  return read_csv(fs::path(path)).values;
}

FittedModel load_fitted(const std::string& model_path, const std::string& data_path) {
  return model_from_json(read_text(model_path), load_training(data_path));
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t d) {
  std::vector<std::string> out;
  for (std::size_t j = 1; j <= d; ++j) out.push_back(prefix + std::to_string(j));
  return out;
}

Eigen::MatrixXd curve_table(const CurveEstimate& curve) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(curve.size()), curve.vertices.cols() + 1);
  m.col(0) = Eigen::Map<const Eigen::VectorXd>(curve.grid.data(), m.rows());
  m.rightCols(curve.vertices.cols()) = curve.vertices;
  return m;
}

}  // namespace

void run_simulate(const SimulateOptions& o, std::ostream& log) {
  const auto shape = parse_shape(o.shape);
  if (!shape) throw ValidationError("unknown shape '" + o.shape + "' (gaussian, parabola, spiral, sine, arc)");
  if (o.n < 3) throw ValidationError("simulate: n must be at least 3");
  std::string truth = o.truth;
  if (truth.empty()) {
    fs::path p(o.out);
    truth = (p.parent_path() / p.stem()).string() + ".truth.csv";
  }
  require_output(o.out, "output");
  require_output(truth, "truth");

  const SyntheticData syn = simulate(*shape, o.n, o.noise_sd, o.seed);
  write_csv(fs::path(o.out), {"y1", "y2"}, syn.points);
  Eigen::MatrixXd t(syn.points.rows(), 3);
  t.col(0) = Eigen::Map<const Eigen::VectorXd>(syn.t.data(), t.rows());
  t.rightCols(2) = syn.clean;
  write_csv(fs::path(truth), {"t", "y1_clean", "y2_clean"}, t);
  log << "wrote " << o.n << " " << shape_name(*shape) << " points to " << o.out << " (truth: " << truth << ")\n";
}

void run_fit(const FitOptions& o, std::ostream& log) {
  require_input(o.data, "data");
  require_output(o.out, "model");
  const Eigen::MatrixXd data = load_training(o.data);

  FitSettings s;
  s.corp.r = o.r;
  s.lle.k_neighbors = o.k_neighbors;
  s.lle.reg = o.reg;
  s.scg.max_iters = o.max_iters;
  s.scg.rel_tol = o.rel_tol;
  s.scg.grad_tol = o.grad_tol;
  s.include_prior = !o.no_prior;
  s.center = !o.no_center;
  s.rank_init = !o.no_rank_init;
  const FittedModel model = fit(data, s);
  save_model(o.out, model);

  log << "objective: initial " << format_real(model.stages.initial) << ", after hyperparameters "
      << format_real(model.stages.hyper_only) << " (" << model.stages.hyper_iterations << " iterations), final "
      << format_real(model.stages.final) << " (" << model.stages.joint_iterations << " iterations)\n";
  for (std::size_t j = 0; j < model.d(); ++j) {
    const KernelParams& p = model.theta().dims[j];
    log << "dim " << j + 1 << ": phi " << format_real(p.phi()) << ", alpha " << format_real(p.alpha())
        << ", sigma2 " << format_real(p.sigma2()) << "\n";
  }
  log << "wrote " << o.out << "\n";
}

void run_curve(const CurveOptions& o, std::ostream& log) {
  require_input(o.model, "model");
  require_input(o.data, "data");
  require_output(o.out, "output");
  const FittedModel model = load_fitted(o.model, o.data);
  const CurveEstimate curve = mean_curve(model, o.n_mu);
  std::vector<std::string> header{"x_mu"};
  for (const std::string& h : numbered("mu_", model.d())) header.push_back(h);
  write_csv(fs::path(o.out), header, curve_table(curve));
  log << "wrote " << curve.size() << " curve vertices to " << o.out << "\n";
}

void run_band(const BandOptions& o, std::ostream& log) {
  if (!(o.eta > 0.0 && o.eta < 1.0)) throw ValidationError("band: eta must lie in (0,1)");
  require_input(o.model, "model");
  require_input(o.data, "data");
  require_output(o.out, "output");
  require_output(o.summary, "summary");
  const FittedModel model = load_fitted(o.model, o.data);
  const CurveEstimate curve = mean_curve(model, o.n_mu);
  const UncertaintyBand band = uncertainty_band(model, curve, {o.eta, o.n1, o.n2, o.seed});

  write_csv(fs::path(o.out), {"distance"},
            Eigen::Map<const Eigen::MatrixXd>(band.sample_distances.data(),
                                              static_cast<Eigen::Index>(band.sample_distances.size()), 1));
  nlohmann::ordered_json summary;
  summary["eta"] = band.eta;
  summary["rho"] = band.rho;
  summary["n1"] = band.n1;
  summary["n2"] = band.n2;
  summary["seed"] = band.seed;
  summary["n_mu"] = o.n_mu;
  write_text(o.summary, summary.dump(2) + "\n");
  log << "rho = " << format_real(band.rho) << " at eta " << format_real(band.eta) << "\n";
}

void run_predict(const PredictOptions& o, std::ostream& log) {
  if (o.method != "map" && o.method != "mh") throw ValidationError("predict: method must be 'map' or 'mh'");
  require_input(o.model, "model");
  require_input(o.data, "data");
  require_input(o.input, "input");
  require_output(o.out, "output");
  const FittedModel model = load_fitted(o.model, o.data);
  const Table records = read_csv(fs::path(o.input), true);
  const std::size_t d = model.d();
  if (static_cast<std::size_t>(records.values.cols()) != d)
    throw ValidationError("predict: input has " + std::to_string(records.values.cols()) +
                          " columns, model expects " + std::to_string(d));

  const auto m = static_cast<std::size_t>(records.values.rows());
  std::vector<PartialObservation> obs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::VectorXd row = records.values.row(static_cast<Eigen::Index>(i)).transpose();
    obs[i] = PartialObservation::from_record({row.data(), d});
    if (obs[i].observed_dims.empty())
      throw ValidationError("predict: record " + std::to_string(i + 1) + " has no observed values");
  }

  // Records are conditionally independent given the fit; each gets its own stream.
  std::vector<LatentPosterior> posts(m);
  std::vector<Reconstruction> recs(m);
  parallel_for(m, [&](std::size_t i) {
    posts[i] = o.method == "map"
                   ? predict_latent_map(model, obs[i])
                   : predict_latent_mh(model, obs[i], {o.n_samples, o.burn_in, mix_seed(o.seed, i)});
    recs[i] = reconstruct_missing(model, obs[i], posts[i]);
  });

  std::vector<std::string> header{"record", "latent", "multimodal", "acceptance_rate"};
  for (std::size_t j = 1; j <= d; ++j) {
    header.push_back("mean_" + std::to_string(j));
    header.push_back("sd_" + std::to_string(j));
  }
  Eigen::MatrixXd table(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(4 + 2 * d));
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    table(r, 0) = static_cast<double>(i + 1);
    table(r, 1) = posts[i].mode;
    table(r, 2) = posts[i].multimodal || posts[i].low_acceptance ? 1.0 : 0.0;
    table(r, 3) = posts[i].acceptance_rate;
    flagged += table(r, 2) != 0.0;
    for (std::size_t k = 0; k < obs[i].observed_dims.size(); ++k) {
      const auto col = static_cast<Eigen::Index>(4 + 2 * obs[i].observed_dims[k]);
      table(r, col) = obs[i].observed_values[k];
      table(r, col + 1) = 0.0;
    }
    for (std::size_t k = 0; k < recs[i].dims.size(); ++k) {
      const auto col = static_cast<Eigen::Index>(4 + 2 * recs[i].dims[k]);
      const auto kk = static_cast<Eigen::Index>(k);
      table(r, col) = recs[i].mean[kk];
      table(r, col + 1) = std::sqrt(recs[i].cov(kk, kk));
    }
  }
  write_csv(fs::path(o.out), header, table);
  log << "predicted " << m << " records (" << o.method << ")";
  if (flagged) log << "; " << flagged << " flagged as multimodal or poorly mixed";
  log << "\n";
}

void run_sample_corp(const SampleCorpOptions& o, std::ostream& out) {
  if (o.n < 1) throw ValidationError("sample-corp: n must be at least 1");
  if (!o.out.empty()) require_output(o.out, "output");
  CorpConfig cfg;
  cfg.r = o.r;
  cfg.validate();
  const PointSet1D points = sample(o.n, cfg, o.seed);
  std::ostringstream text;
  text << "x\n";
  for (double x : points.values()) text << format_real(x) << "\n";
  if (o.out.empty())
    out << text.str();
  else
    write_text(o.out, text.str());
}

void run_plot(const PlotOptions& o, std::ostream& log) {
  require_input(o.data, "data");
  require_input(o.model, "model");
  require_output(o.out, "output");
  const Eigen::MatrixXd data = load_training(o.data);
  if (data.cols() != 2)
    throw ValidationError("plot: data has " + std::to_string(data.cols()) +
                          " columns; only planar data can be plotted, use the curve/band CSV exports instead");
  double rho = 0.0;
  std::size_t n_mu = o.n_mu;
  if (!o.band.empty()) {
    require_input(o.band, "band summary");
    try {
      const auto summary = nlohmann::json::parse(read_text(o.band));
      rho = summary.at("rho").get<double>();
      n_mu = summary.value("n_mu", n_mu);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("plot: malformed band summary: ") + e.what());
    }
  }
  const FittedModel model = model_from_json(read_text(o.model), data);
  const CurveEstimate curve = mean_curve(model, n_mu);
  write_text(o.out, render_svg(data, curve.vertices, rho));
  log << "wrote " << o.out << "\n";
}

}  // namespace electrogp::cli
