#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace electrogp::cli {

struct SimulateOptions {
  std::string shape = "spiral";
  std::size_t n = 100;
  double noise_sd = 0.05;
  std::uint64_t seed = 0;
  std::string out;
  std::string truth;  // default: <out without .csv>.truth.csv
};

struct FitOptions {
  std::string data;
  std::string out;
  double r = 1.0;
  int k_neighbors = 8;
  double reg = 0.1;
  int max_iters = 500;
  double rel_tol = 1e-7;
  double grad_tol = 1e-6;
  bool no_prior = false;
  bool no_center = false;
  bool no_rank_init = false;
};

struct CurveOptions {
  std::string model;
  std::string data;
  std::size_t n_mu = 512;
  std::string out;
};

struct BandOptions {
  std::string model;
  std::string data;
  std::size_t n_mu = 512;
  double eta = 0.95;
  std::size_t n1 = 100;
  std::size_t n2 = 50;
  std::uint64_t seed = 0;
  std::string out;      // pooled distances CSV
  std::string summary;  // JSON summary
};

struct PredictOptions {
  std::string model;
  std::string data;
  std::string input;
  std::string method = "map";
  std::uint64_t seed = 0;
  std::size_t n_samples = 5000;
  std::size_t burn_in = 1000;
  std::string out;
};

struct SampleCorpOptions {
  std::size_t n = 10;
  double r = 1.0;
  std::uint64_t seed = 0;
  std::string out;  // empty: stdout
};

struct PlotOptions {
  std::string data;
  std::string model;
  std::string band;  // band summary JSON
  std::string out;
  std::size_t n_mu = 512;
};

void run_simulate(const SimulateOptions& o, std::ostream& log);
void run_fit(const FitOptions& o, std::ostream& log);
void run_curve(const CurveOptions& o, std::ostream& log);
void run_band(const BandOptions& o, std::ostream& log);
void run_predict(const PredictOptions& o, std::ostream& log);
void run_sample_corp(const SampleCorpOptions& o, std::ostream& out);
void run_plot(const PlotOptions& o, std::ostream& log);

}  // namespace electrogp::cli
