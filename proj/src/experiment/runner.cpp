#include <fstream>

#include <spdlog/spdlog.h>

#include "rssgp/benchmarks.hpp"
#include "rssgp/experiment.hpp"

namespace rssgp {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void write_manifest(const std::filesystem::path& path, const ExperimentSpec& spec, int workers,
                    bool complete) {
  std::string text = "# Resolved experiment configuration; rerun with `rssgp run " +
                     path.filename().string() + "`.\n";
  text += "# workers = " + std::to_string(workers) + "\n";
  text += "# trial k draws its initial design and model randomness from derive_seed(seed, k)\n";
  text += std::string("status = ") + (complete ? "complete" : "incomplete") + "\n";
  text += format_experiment(spec);
  write_file(path, text);
}

}  // namespace

ExperimentOutputs run_experiment(const ExperimentSpec& spec, int workers) {
  if (spec.arms.empty()) throw ConfigError("experiment has no arms");
  const Objective objective = objective_by_name(spec.objective);
  const std::filesystem::path dir = spec.output_dir.empty() ? "results" : spec.output_dir;
  std::filesystem::create_directories(dir);

  ExperimentOutputs outputs;
  outputs.manifest_file = dir / "manifest.cfg";
  outputs.aggregate_file = dir / "aggregate.csv";
  outputs.plot_file = dir / "regret.svg";
  write_manifest(outputs.manifest_file, spec, workers, false);

  std::vector<AggregateRow> aggregate;
  std::vector<PlotSeries> series;
  for (const ArmSpec& arm : spec.arms) {
    spdlog::info("arm {}: {} trials of {} iterations on {}", arm.name, spec.trials,
                 spec.iterations, spec.objective);
    const TrialSpec trial_spec{objective, arm.model, spec.init_points, spec.iterations};
    const TrialAggregate result = run_trials(trial_spec, spec.trials, spec.seed, workers);

    std::vector<TraceRow> rows;
    for (std::size_t k = 0; k < result.traces.size(); ++k) {
      for (const BoRecord& r : result.traces[k].records) {
        TraceRow row;
        row.trial = static_cast<int>(k);
        row.iteration = r.iteration;
        row.x.assign(r.query.data(), r.query.data() + r.query.size());
        row.y = objective.to_native(r.y);
        row.incumbent = objective.to_native(r.incumbent);
        row.regret = r.regret;
        row.entropy = r.entropy;
        row.seconds = spec.record_wall_time ? r.seconds : 0.0;
        rows.push_back(std::move(row));
      }
    }
    std::ostringstream trace;
    write_trace_csv(trace, objective.dim, rows);
    const std::filesystem::path trace_file = dir / ("trace_" + arm.name + ".csv");
    write_file(trace_file, trace.str());
    outputs.trace_files.push_back(trace_file);

    for (int i = 0; i < spec.iterations; ++i) {
      aggregate.push_back({arm.name, i + 1, result.mean_regret[i], result.std_error[i]});
    }
    series.push_back({arm.name, result.mean_regret, result.std_error});
  }

  std::ostringstream agg;
  write_aggregate_csv(agg, aggregate);
  write_file(outputs.aggregate_file, agg.str());
  write_file(outputs.plot_file,
             render_regret_svg(spec.objective + ": mean simple regret (+/- 1 s.e.)", series));
  write_manifest(outputs.manifest_file, spec, workers, true);
  return outputs;
}

}  // namespace rssgp
