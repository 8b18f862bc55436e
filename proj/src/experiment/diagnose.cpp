#include <chrono>
#include <fstream>

#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include "rssgp/benchmarks.hpp"
#include "rssgp/experiment.hpp"
#include "rssgp/rssgp_objective.hpp"

namespace rssgp {

namespace {

Eigen::MatrixXd linspace_grid(const SearchBox& box, int points) {
  return Eigen::VectorXd::LinSpaced(points, box.lower()(0), box.upper()(0));
}

Eigen::VectorXd bin_masses(const MaxDistribution& q, const SearchBox& box, int bins) {
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(bins);
  const double lo = box.lower()(0);
  const double width = box.width()(0) / bins;
  for (std::size_t i = 0; i < q.support.size(); ++i) {
    const int b = std::clamp(static_cast<int>((q.support[i](0) - lo) / width), 0, bins - 1);
    mass(b) += q.pmf[i];
  }
  return mass;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

std::vector<Eigen::VectorXd> full_gp_grid_maximizers(const FullGpPosterior& model,
                                                     const Eigen::MatrixXd& grid, int count,
                                                     Rng& rng) {
  const Eigen::Index n = grid.rows();
  const Dataset& data = model.data();
  Eigen::MatrixXd cross(data.size(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int i = 0; i < data.size(); ++i) {
      cross(i, j) = model.covariance(data.inputs.row(i).transpose(), grid.row(j).transpose());
    }
  }
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      cov(a, b) = cov(b, a) = model.covariance(grid.row(a).transpose(), grid.row(b).transpose());
    }
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  if (data.size() > 0) {
    mean = cross.transpose() * model.alpha();
    const Eigen::MatrixXd half =
        model.gram_factor().triangularView<Eigen::Lower>().solve(cross);
    cov -= half.transpose() * half;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::MatrixXd root =
      eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(count));
  Eigen::VectorXd z(n);
  for (int s = 0; s < count; ++s) {
    for (Eigen::Index j = 0; j < n; ++j) z(j) = normal(rng);
    Eigen::Index best = 0;
    (mean + root * z).maxCoeff(&best);
    out.push_back(grid.row(best).transpose());
  }
  return out;
}

GmdComparison compare_gmd(const DiagnoseSpec& spec, std::uint64_t seed, int workers) {
  const Objective objective = objective_by_name(spec.objective);
  if (objective.dim != 1) throw std::invalid_argument("compare_gmd: needs a 1d objective");
  const SearchBox& box = objective.box;

  GmdComparison out;
  Rng data_rng = make_rng(seed, 0);
  out.data = initial_design(objective, spec.observations, 0.0, data_rng);

  out.full_gp = fit_full_gp(out.data, spec.params);
  Rng full_rng = make_rng(seed, 1);
  const std::vector<Eigen::VectorXd> full_max = full_gp_grid_maximizers(
      out.full_gp, linspace_grid(box, spec.band_points), spec.gmd_samples, full_rng);
  const std::vector<double> ones(full_max.size(), 1.0);
  out.gmd_full_gp = histogram_distribution(full_max, ones, box, spec.bins);

  Rng basis_rng = make_rng(seed, 2);
  const SpectralBasis init = sample_frequencies(spec.params, spec.features, basis_rng);
  RssgpConfig cfg;
  cfg.optimizer_steps = spec.steps;
  cfg.step_size = spec.step_size;
  cfg.seed = seed;
  cfg.gmd_estimator = GmdEstimator::kEiProxy;

  cfg.lambda = 0.0;
  Rng ssgp_rng = make_rng(seed, 3);
  const OptimizationResult fit_ml = optimize_frequencies(out.data, init, spec.params, cfg, box, ssgp_rng);
  out.ssgp = fit_ssgp(out.data, fit_ml.basis, fit_ml.params);

  cfg.lambda = spec.lambda;
  Rng rssgp_rng = make_rng(seed, 4);
  const OptimizationResult fit_reg = optimize_frequencies(out.data, init, spec.params, cfg, box, rssgp_rng);
  out.rssgp = fit_ssgp(out.data, fit_reg.basis, fit_reg.params);

  ThompsonConfig ts;
  ts.samples = spec.gmd_samples;
  ts.bins = spec.bins;
  ts.workers = workers;
  Rng ts_rng = make_rng(seed, 5);
  out.gmd_ssgp = gmd_thompson(out.ssgp, box, ts, ts_rng);
  out.gmd_rssgp = gmd_thompson(out.rssgp, box, ts, ts_rng);
  return out;
}

DiagnoseOutputs diagnose_gmd(const DiagnoseSpec& spec, int workers) {
  const Objective objective = objective_by_name(spec.objective);
  const SearchBox& box = objective.box;
  const std::filesystem::path dir = spec.output_dir.empty() ? "results" : spec.output_dir;
  std::filesystem::create_directories(dir);
  const GmdComparison cmp = compare_gmd(spec, spec.seed, workers);

  DiagnoseOutputs outputs;
  outputs.entropy_full_gp = cmp.gmd_full_gp.entropy;
  outputs.entropy_ssgp = cmp.gmd_ssgp.entropy;
  outputs.entropy_rssgp = cmp.gmd_rssgp.entropy;
  const auto emit = [&](const std::string& name, const std::string& text) {
    const std::filesystem::path path = dir / name;
    write_text(path, text);
    outputs.files.push_back(path);
  };

  {
    std::ostringstream csv;
    csv << "x,objective,full_gp_mean,full_gp_lower,full_gp_upper,ssgp_mean,ssgp_lower,"
           "ssgp_upper,rssgp_mean,rssgp_lower,rssgp_upper\n";
    const Eigen::MatrixXd grid = linspace_grid(box, spec.band_points);
    const BatchPrediction ps = predict_ssgp_batch(cmp.ssgp, grid, false);
    const BatchPrediction pr = predict_ssgp_batch(cmp.rssgp, grid, false);
    const auto band = [&](double mean, double variance) {
      const double sd = std::sqrt(std::max(variance, 0.0));
      return format_double(mean) + "," + format_double(mean - 2.0 * sd) + "," +
             format_double(mean + 2.0 * sd);
    };
    for (Eigen::Index j = 0; j < grid.rows(); ++j) {
      const Eigen::VectorXd x = grid.row(j).transpose();
      const Prediction pf = predict_full_gp(cmp.full_gp, x, false);
      csv << format_double(x(0)) << ',' << format_double(objective.evaluate_for_max(x)) << ','
          << band(pf.mean, pf.variance) << ',' << band(ps.mean(j), ps.variance(j)) << ','
          << band(pr.mean(j), pr.variance(j)) << '\n';
    }
    emit("posterior_bands.csv", csv.str());
  }

  {
    std::ostringstream csv;
    csv << "model,sample,x_max\n";
    Rng rng = make_rng(spec.seed, 10);
    const auto full = full_gp_grid_maximizers(cmp.full_gp, linspace_grid(box, spec.band_points),
                                              spec.posterior_samples, rng);
    ThompsonConfig ts;
    ts.samples = spec.posterior_samples;
    ts.bins = spec.bins;
    ts.workers = workers;
    const auto sparse = thompson_maximizers(cmp.ssgp, box, ts, rng);
    const auto regularized = thompson_maximizers(cmp.rssgp, box, ts, rng);
    const auto rows = [&](const std::string& model, const std::vector<Eigen::VectorXd>& xs) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        csv << model << ',' << i << ',' << format_double(xs[i](0)) << '\n';
      }
    };
    rows("full_gp", full);
    rows("ssgp", sparse);
    rows("rssgp", regularized);
    emit("posterior_maximizers.csv", csv.str());
  }

  {
    std::ostringstream csv;
    csv << "bin_center,full_gp,ssgp,rssgp\n";
    const Eigen::VectorXd f = bin_masses(cmp.gmd_full_gp, box, spec.bins);
    const Eigen::VectorXd s = bin_masses(cmp.gmd_ssgp, box, spec.bins);
    const Eigen::VectorXd r = bin_masses(cmp.gmd_rssgp, box, spec.bins);
    const double width = box.width()(0) / spec.bins;
    for (int b = 0; b < spec.bins; ++b) {
      csv << format_double(box.lower()(0) + (b + 0.5) * width) << ',' << format_double(f(b))
          << ',' << format_double(s(b)) << ',' << format_double(r(b)) << '\n';
    }
    emit("gmd_pmf.csv", csv.str());

    std::ostringstream entropy;
    entropy << "model,entropy\n"
            << "full_gp," << format_double(outputs.entropy_full_gp) << '\n'
            << "ssgp," << format_double(outputs.entropy_ssgp) << '\n'
            << "rssgp," << format_double(outputs.entropy_rssgp) << '\n';
    emit("gmd_entropy.csv", entropy.str());
  }

  {
    // Estimator comparison on the fixed RSSGP posterior.
    std::ostringstream csv;
    csv << "method,seconds,draws,total_variation\n";
    ThompsonConfig ref;
    ref.samples = spec.reference_samples;
    ref.bins = spec.bins;
    ref.workers = workers;
    Rng rng = make_rng(spec.seed, 20);
    auto start = std::chrono::steady_clock::now();
    const MaxDistribution reference = gmd_thompson(cmp.rssgp, box, ref, rng);
    csv << "ts_reference," << format_double(seconds_since(start)) << ',' << ref.samples << ",0\n";

    SmcConfig smc = spec.smc;
    smc.workers = workers;
    start = std::chrono::steady_clock::now();
    const SmcResult smc_default = gmd_smc(cmp.rssgp, box, smc, std::nullopt, rng);
    csv << "smc_default," << format_double(seconds_since(start)) << ',' << smc_default.rounds_run
        << ',' << format_double(total_variation(smc_default.distribution, reference, box, spec.bins))
        << '\n';

    smc.time_budget = spec.time_budget;
    start = std::chrono::steady_clock::now();
    const SmcResult smc_timed = gmd_smc(cmp.rssgp, box, smc, std::nullopt, rng);
    csv << "smc_equal_time," << format_double(seconds_since(start)) << ',' << smc_timed.rounds_run
        << ',' << format_double(total_variation(smc_timed.distribution, reference, box, spec.bins))
        << '\n';

    ThompsonConfig timed;
    timed.bins = spec.bins;
    timed.time_budget = spec.time_budget;
    timed.workers = workers;
    start = std::chrono::steady_clock::now();
    const std::vector<Eigen::VectorXd> ts_points = thompson_maximizers(cmp.rssgp, box, timed, rng);
    const double ts_seconds = seconds_since(start);
    const std::vector<double> ones(ts_points.size(), 1.0);
    const MaxDistribution ts_timed = histogram_distribution(ts_points, ones, box, spec.bins);
    csv << "ts_equal_time," << format_double(ts_seconds) << ',' << ts_points.size() << ','
        << format_double(total_variation(ts_timed, reference, box, spec.bins)) << '\n';
    emit("mc_vs_ts.csv", csv.str());
  }
  spdlog::info("GMD entropy: full GP {:.4f}, SSGP {:.4f}, RSSGP {:.4f}", outputs.entropy_full_gp,
               outputs.entropy_ssgp, outputs.entropy_rssgp);
  return outputs;
}

}  // namespace rssgp
