#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rssgp/bo.hpp"
#include "rssgp/full_gp.hpp"
#include "rssgp/gmd.hpp"
#include "rssgp/ssgp.hpp"

namespace rssgp {

/// Invalid or unparsable experiment configuration. The message names the
/// offending line or field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ArmSpec {
  std::string name;
  ModelConfig model;
};

struct ExperimentSpec {
  std::string objective;
  int init_points = 20;
  int iterations = 50;
  int trials = 10;
  std::uint64_t seed = 0;
  /// Empty: taken from the command line, the environment, or "results".
  std::filesystem::path output_dir;
  bool record_wall_time = false;
  std::vector<ArmSpec> arms;
};

/// Settings of the GMD diagnostic on a 1d objective.
struct DiagnoseSpec {
  std::string objective = "sinc1";
  int observations = 10;
  int features = 30;
  double lambda = 10.0;
  int steps = 200;
  double step_size = 0.05;
  KernelParams params = KernelParams::isotropic(1, 1.0, 1.0, 1e-4);
  int posterior_samples = 200;
  int gmd_samples = 5000;
  int reference_samples = 50000;
  int bins = 20;
  int band_points = 201;
  double time_budget = 0.5;
  SmcConfig smc{};
  std::uint64_t seed = 0;
  /// Empty: taken from the command line, the environment, or "results".
  std::filesystem::path output_dir;
};

/// Command-line overrides applied on top of a parsed file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  int workers = 1;
};

ExperimentSpec parse_experiment(std::istream& in);
ExperimentSpec load_experiment(const std::filesystem::path& path);
DiagnoseSpec parse_diagnose(std::istream& in);
DiagnoseSpec load_diagnose(const std::filesystem::path& path);

/// Serializes the fully resolved spec in the same config grammar, so the
/// output can be fed back to parse_experiment.
std::string format_experiment(const ExperimentSpec& spec);

struct ExperimentOutputs {
  std::vector<std::filesystem::path> trace_files;
  std::filesystem::path aggregate_file;
  std::filesystem::path manifest_file;
  std::filesystem::path plot_file;
};

/// Runs every arm and writes trace_<arm>.csv, aggregate.csv, manifest.cfg and
/// regret.svg into spec.output_dir.
ExperimentOutputs run_experiment(const ExperimentSpec& spec, int workers = 1);

/// Full GP, SSGP (frequencies fit by marginal likelihood) and RSSGP on one
/// random draw of observations of the diagnostic objective. The full-GP GMD
/// comes from exact joint posterior draws on a grid of `band_points` inputs;
/// the sparse GMDs from `gmd_samples` Thompson draws on the fitted basis.
struct GmdComparison {
  Dataset data;
  FullGpPosterior full_gp;
  SsgpPosterior ssgp;
  SsgpPosterior rssgp;
  MaxDistribution gmd_full_gp;
  MaxDistribution gmd_ssgp;
  MaxDistribution gmd_rssgp;
};
GmdComparison compare_gmd(const DiagnoseSpec& spec, std::uint64_t seed, int workers = 1);

/// Maximizer locations of exact full-GP posterior draws over `grid` (n x d).
std::vector<Eigen::VectorXd> full_gp_grid_maximizers(const FullGpPosterior& model,
                                                     const Eigen::MatrixXd& grid, int count,
                                                     Rng& rng);

struct DiagnoseOutputs {
  std::vector<std::filesystem::path> files;
  double entropy_full_gp = 0.0;
  double entropy_ssgp = 0.0;
  double entropy_rssgp = 0.0;
};

DiagnoseOutputs diagnose_gmd(const DiagnoseSpec& spec, int workers = 1);

// CSV helpers, exposed for round-trip checks.

struct TraceRow {
  int trial = 0;
  int iteration = 0;
  std::vector<double> x;
  double y = 0.0;
  double incumbent = 0.0;
  double regret = 0.0;
  double entropy = 0.0;
  double seconds = 0.0;
};

struct AggregateRow {
  std::string arm;
  int iteration = 0;
  double mean_regret = 0.0;
  double std_error = 0.0;
};

/// Shortest representation that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

void write_trace_csv(std::ostream& out, int dim, const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace_csv(std::istream& in);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> read_aggregate_csv(std::istream& in);

struct PlotSeries {
  std::string label;
  std::vector<double> mean;
  std::vector<double> std_error;
};

/// Line plot of mean regret with a +/- one standard-error band per series.
std::string render_regret_svg(const std::string& title, const std::vector<PlotSeries>& series);

}  // namespace rssgp
