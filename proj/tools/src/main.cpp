// electrogp: fit and query one-dimensional manifold models from CSV data.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "electrogp/error.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kIntegrity = 3, kNumerical = 4 };

}  // namespace

int main(int argc, char** argv) {
  using namespace electrogp::cli;

  CLI::App app{"electrogp: Gaussian-process manifold curves with a repulsive latent prior"};
  app.set_config("--config", "", "TOML file of option values; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Write a seeded synthetic planar dataset and its truth sidecar");
  simulate->add_option("--shape", sim.shape, "gaussian, parabola, spiral, sine or arc")->capture_default_str();
  simulate->add_option("--n", sim.n, "Number of points")->capture_default_str();
  simulate->add_option("--noise-sd", sim.noise_sd, "Gaussian noise standard deviation")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "RNG seed")->required();
  simulate->add_option("--out,-o", sim.out, "Output CSV")->required();
  simulate->add_option("--truth", sim.truth, "Truth sidecar CSV (default: <out>.truth.csv)");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit latent coordinates and kernel hyperparameters");
  fit_cmd->add_option("--data,-d", fit.data, "Training CSV")->required();
  fit_cmd->add_option("--out,-o", fit.out, "Model JSON")->required();
  fit_cmd->add_option("--r", fit.r, "Repulsive strength of the latent prior")->capture_default_str();
  fit_cmd->add_option("--k-neighbors", fit.k_neighbors, "Neighbours for the initial embedding")->capture_default_str();
  fit_cmd->add_option("--reg", fit.reg, "Embedding ridge, as a fraction of the local Gram trace")->capture_default_str();
  fit_cmd->add_option("--max-iters", fit.max_iters, "Optimizer iteration cap per stage")->capture_default_str();
  fit_cmd->add_option("--rel-tol", fit.rel_tol, "Relative objective/step tolerance")->capture_default_str();
  fit_cmd->add_option("--grad-tol", fit.grad_tol, "Gradient norm tolerance")->capture_default_str();
  fit_cmd->add_flag("--no-prior", fit.no_prior, "Drop the repulsive prior (plain GP-LVM ablation)");
  fit_cmd->add_flag("--no-center", fit.no_center, "Do not subtract column means");
  fit_cmd->add_flag("--no-rank-init", fit.no_rank_init, "Start from the rescaled embedding instead of its ranks");

  CurveOptions curve;
  auto* curve_cmd = app.add_subcommand("curve", "Export the posterior mean curve");
  curve_cmd->add_option("--model,-m", curve.model, "Model JSON")->required();
  curve_cmd->add_option("--data,-d", curve.data, "Training CSV the model was fitted to")->required();
  curve_cmd->add_option("--n-mu", curve.n_mu, "Grid points")->capture_default_str();
  curve_cmd->add_option("--out,-o", curve.out, "Output CSV")->required();

  BandOptions band;
  auto* band_cmd = app.add_subcommand("band", "Monte-Carlo uncertainty band radius around the mean curve");
  band_cmd->add_option("--model,-m", band.model, "Model JSON")->required();
  band_cmd->add_option("--data,-d", band.data, "Training CSV the model was fitted to")->required();
  band_cmd->add_option("--n-mu", band.n_mu, "Curve grid points")->capture_default_str();
  band_cmd->add_option("--eta", band.eta, "Coverage level in (0,1)")->capture_default_str();
  band_cmd->add_option("--n1", band.n1, "Latent draws per repetition")->capture_default_str();
  band_cmd->add_option("--n2", band.n2, "Repetitions")->capture_default_str();
  band_cmd->add_option("--seed", band.seed, "RNG seed")->required();
  band_cmd->add_option("--out,-o", band.out, "Pooled distances CSV")->required();
  band_cmd->add_option("--summary", band.summary, "Summary JSON")->required();

  PredictOptions pred;
  std::string pred_seed;
  auto* predict = app.add_subcommand("predict", "Latent positions and reconstructions for partially observed records");
  predict->add_option("--model,-m", pred.model, "Model JSON")->required();
  predict->add_option("--data,-d", pred.data, "Training CSV the model was fitted to")->required();
  predict->add_option("--input,-i", pred.input, "Records CSV; empty fields are missing")->required();
  predict->add_option("--method", pred.method, "map or mh")->capture_default_str();
  predict->add_option("--seed", pred.seed, "RNG seed (required for mh)");
  predict->add_option("--n-samples", pred.n_samples, "MH chain length after burn-in")->capture_default_str();
  predict->add_option("--burn-in", pred.burn_in, "MH burn-in")->capture_default_str();
  predict->add_option("--out,-o", pred.out, "Output CSV")->required();

  SampleCorpOptions corp;
  auto* sample_corp = app.add_subcommand("sample-corp", "Draw a realization of the repulsive process on (0,1)");
  sample_corp->add_option("--n", corp.n, "Number of points")->capture_default_str();
  sample_corp->add_option("--r", corp.r, "Repulsive strength")->capture_default_str();
  sample_corp->add_option("--seed", corp.seed, "RNG seed")->required();
  sample_corp->add_option("--out,-o", corp.out, "Output file (default: stdout)");

  PlotOptions plot;
  auto* plot_cmd = app.add_subcommand("plot", "SVG of planar data, mean curve and band");
  plot_cmd->add_option("--data,-d", plot.data, "Training CSV")->required();
  plot_cmd->add_option("--model,-m", plot.model, "Model JSON")->required();
  plot_cmd->add_option("--band,-b", plot.band, "Band summary JSON (omit for rho = 0)");
  plot_cmd->add_option("--n-mu", plot.n_mu, "Curve grid points when no band summary is given")->capture_default_str();
  plot_cmd->add_option("--out,-o", plot.out, "Output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) run_simulate(sim, std::cerr);
    if (*fit_cmd) run_fit(fit, std::cerr);
    if (*curve_cmd) run_curve(curve, std::cerr);
    if (*band_cmd) run_band(band, std::cerr);
    if (*predict) {
      if (pred.method == "mh" && predict->count("--seed") == 0)
        throw electrogp::ValidationError("predict: --seed is required with --method mh");
      run_predict(pred, std::cerr);
    }
    if (*sample_corp) run_sample_corp(corp, std::cout);
    if (*plot_cmd) run_plot(plot, std::cerr);
  } catch (const electrogp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const electrogp::IntegrityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIntegrity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
