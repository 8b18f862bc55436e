#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rssgp/benchmarks.hpp"
#include "rssgp/experiment.hpp"

namespace rssgp {

namespace {

namespace pt = boost::property_tree;

constexpr std::string_view kArmPrefix = "arm:";

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

[[noreturn]] void fail(const std::string& where, const std::string& key, const std::string& why) {
  throw ConfigError(where + ": '" + key + "': " + why);
}

template <typename T>
T to_integer(const std::string& where, const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) fail(where, key, "expected an integer, got '" + value + "'");
  return out;
}

double to_real(const std::string& where, const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    fail(where, key, "expected a number, got '" + value + "'");
  }
  return out;
}

bool to_bool(const std::string& where, const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(where, key, "expected true or false, got '" + value + "'");
}

int positive(const std::string& where, const std::string& key, const std::string& value) {
  const int v = to_integer<int>(where, key, value);
  if (v < 1) fail(where, key, "must be >= 1");
  return v;
}

int non_negative(const std::string& where, const std::string& key, const std::string& value) {
  const int v = to_integer<int>(where, key, value);
  if (v < 0) fail(where, key, "must be >= 0");
  return v;
}

double positive_real(const std::string& where, const std::string& key, const std::string& value) {
  const double v = to_real(where, key, value);
  if (!(v > 0.0)) fail(where, key, "must be > 0");
  return v;
}

double non_negative_real(const std::string& where, const std::string& key,
                         const std::string& value) {
  const double v = to_real(where, key, value);
  if (v < 0.0) fail(where, key, "must be >= 0");
  return v;
}

Eigen::VectorXd to_real_list(const std::string& where, const std::string& key,
                             const std::string& value) {
  std::vector<double> parts;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) parts.push_back(positive_real(where, key, trim(item)));
  if (parts.empty()) fail(where, key, "expected a comma-separated list");
  return Eigen::Map<Eigen::VectorXd>(parts.data(), static_cast<Eigen::Index>(parts.size()));
}

/// Applies one model setting; returns false for keys it does not know.
bool apply_model_key(ModelConfig& m, const std::string& where, const std::string& key,
                     const std::string& value) {
  RssgpConfig& r = m.rssgp;
  try {
    if (key == "model") {
      m.kind = parse_model_kind(value);
    } else if (key == "gmd_estimator") {
      r.gmd_estimator = parse_gmd_estimator(value);
    } else if (key == "features") {
      m.features = positive(where, key, value);
    } else if (key == "lengthscale") {
      m.params.lengthscales = Eigen::VectorXd::Constant(1, positive_real(where, key, value));
    } else if (key == "lengthscales") {
      m.params.lengthscales = to_real_list(where, key, value);
    } else if (key == "signal_variance") {
      m.params.signal_variance = positive_real(where, key, value);
    } else if (key == "noise_variance") {
      m.params.noise_variance = non_negative_real(where, key, value);
    } else if (key == "lambda") {
      r.lambda = non_negative_real(where, key, value);
    } else if (key == "optimizer_steps") {
      r.optimizer_steps = non_negative(where, key, value);
    } else if (key == "step_size") {
      r.step_size = positive_real(where, key, value);
    } else if (key == "entropy_floor") {
      r.entropy_floor = positive_real(where, key, value);
    } else if (key == "learn_kernel") {
      r.learn_kernel = to_bool(where, key, value);
    } else if (key == "fd_step") {
      r.fd_step = positive_real(where, key, value);
    } else if (key == "bins") {
      r.thompson.bins = r.smc.bins = positive(where, key, value);
    } else if (key == "ts_samples") {
      r.thompson.samples = positive(where, key, value);
    } else if (key == "smc_particles") {
      r.smc.particles = positive(where, key, value);
    } else if (key == "smc_challengers") {
      r.smc.challengers = positive(where, key, value);
    } else if (key == "smc_rounds") {
      r.smc.rounds = non_negative(where, key, value);
    } else if (key == "smc_mixture") {
      r.smc.mixture = to_real(where, key, value);
      if (r.smc.mixture < 0.0 || r.smc.mixture > 1.0) fail(where, key, "must lie in [0, 1]");
    } else if (key == "smc_refresh_rounds") {
      r.smc_refresh_rounds = positive(where, key, value);
    } else if (key == "ei_grid_points") {
      r.ei_grid_points = positive(where, key, value);
    } else if (key == "ei_scattered_points") {
      r.ei_scattered_points = positive(where, key, value);
    } else if (key == "direct_budget") {
      m.direct_budget = positive(where, key, value);
    } else if (key == "observation_noise") {
      m.observation_noise = non_negative_real(where, key, value);
    } else if (key == "warm_start") {
      m.warm_start = to_bool(where, key, value);
    } else if (key == "normalize_inputs") {
      m.normalize_inputs = to_bool(where, key, value);
    } else if (key == "standardize_outputs") {
      m.standardize_outputs = to_bool(where, key, value);
    } else {
      return false;
    }
  } catch (const std::invalid_argument& e) {
    fail(where, key, e.what());
  }
  return true;
}

ModelConfig default_model() {
  ModelConfig m;
  m.params.lengthscales = Eigen::VectorXd::Constant(1, 0.5);
  m.params.signal_variance = 2.0;
  m.params.noise_variance = 1e-4;
  return m;
}

pt::ptree read_tree(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  return tree;
}

void finish_model(ModelConfig& m, int dim, const std::string& where) {
  if (m.params.lengthscales.size() == 1 && dim > 1) {
    m.params.lengthscales = Eigen::VectorXd::Constant(dim, m.params.lengthscales(0));
  }
  if (m.params.lengthscales.size() != dim) {
    fail(where, "lengthscales", "expected " + std::to_string(dim) + " values");
  }
  if (m.kind != ModelKind::kFullGp && !(m.params.noise_variance > 0.0)) {
    fail(where, "noise_variance", "sparse spectrum models need a positive noise variance");
  }
  if (m.direct_budget < 100 * dim) {
    fail(where, "direct_budget", "must be at least " + std::to_string(100 * dim));
  }
}

bool valid_arm_name(const std::string& name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

}  // namespace

ExperimentSpec parse_experiment(std::istream& in) {
  const pt::ptree tree = read_tree(in);
  ExperimentSpec spec;
  ModelConfig defaults = default_model();
  bool has_objective = false;
  std::vector<std::pair<std::string, const pt::ptree*>> sections;

  for (const auto& [key, node] : tree) {
    if (!node.empty()) {
      sections.emplace_back(key, &node);
      continue;
    }
    const std::string value = trim(node.data());
    const std::string where = "top level";
    if (key == "objective") {
      spec.objective = value;
      has_objective = true;
    } else if (key == "init_points") {
      spec.init_points = positive(where, key, value);
    } else if (key == "iterations") {
      spec.iterations = positive(where, key, value);
    } else if (key == "trials") {
      spec.trials = positive(where, key, value);
    } else if (key == "seed") {
      spec.seed = to_integer<std::uint64_t>(where, key, value);
    } else if (key == "output_dir") {
      if (value.empty()) fail(where, key, "must not be empty");
      spec.output_dir = value;
    } else if (key == "record_wall_time") {
      spec.record_wall_time = to_bool(where, key, value);
    } else if (key == "status") {
      if (value != "complete" && value != "incomplete") {
        fail(where, key, "expected complete or incomplete");
      }
    } else if (!apply_model_key(defaults, where, key, value)) {
      fail(where, key, "unknown key");
    }
  }
  if (!has_objective) throw ConfigError("top level: 'objective' is required");

  int dim = 0;
  try {
    dim = objective_by_name(spec.objective).dim;
  } catch (const std::invalid_argument&) {
    fail("top level", "objective", "unknown objective '" + spec.objective + "'");
  }

  for (const auto& [section, node] : sections) {
    if (!section.starts_with(kArmPrefix)) {
      throw ConfigError("section [" + section + "]: expected [arm:<name>]");
    }
    ArmSpec arm;
    arm.name = section.substr(kArmPrefix.size());
    const std::string where = "section [" + section + "]";
    if (!valid_arm_name(arm.name)) {
      throw ConfigError(where + ": arm names use letters, digits, '_' and '-'");
    }
    arm.model = defaults;
    for (const auto& [key, child] : *node) {
      if (!child.empty()) fail(where, key, "nested sections are not supported");
      if (!apply_model_key(arm.model, where, key, trim(child.data()))) {
        fail(where, key, "unknown key");
      }
    }
    finish_model(arm.model, dim, where);
    spec.arms.push_back(std::move(arm));
  }
  if (spec.arms.empty()) throw ConfigError("at least one [arm:<name>] section is required");
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_experiment(in);
}

std::string format_experiment(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "objective = " << spec.objective << "\n"
      << "init_points = " << spec.init_points << "\n"
      << "iterations = " << spec.iterations << "\n"
      << "trials = " << spec.trials << "\n"
      << "seed = " << spec.seed << "\n";
  if (!spec.output_dir.empty()) out << "output_dir = " << spec.output_dir.string() << "\n";
  out << "record_wall_time = " << (spec.record_wall_time ? "true" : "false") << "\n";
  for (const ArmSpec& arm : spec.arms) {
    const ModelConfig& m = arm.model;
    const RssgpConfig& r = m.rssgp;
    const auto b = [](bool v) { return v ? "true" : "false"; };
    std::string lengthscales;
    for (Eigen::Index i = 0; i < m.params.lengthscales.size(); ++i) {
      if (i > 0) lengthscales += ",";
      lengthscales += format_double(m.params.lengthscales(i));
    }
    out << "\n[arm:" << arm.name << "]\n"
        << "model = " << to_string(m.kind) << "\n"
        << "features = " << m.features << "\n"
        << "lengthscales = " << lengthscales << "\n"
        << "signal_variance = " << format_double(m.params.signal_variance) << "\n"
        << "noise_variance = " << format_double(m.params.noise_variance) << "\n"
        << "lambda = " << format_double(r.lambda) << "\n"
        << "gmd_estimator = " << to_string(r.gmd_estimator) << "\n"
        << "optimizer_steps = " << r.optimizer_steps << "\n"
        << "step_size = " << format_double(r.step_size) << "\n"
        << "entropy_floor = " << format_double(r.entropy_floor) << "\n"
        << "learn_kernel = " << b(r.learn_kernel) << "\n"
        << "fd_step = " << format_double(r.fd_step) << "\n"
        << "bins = " << r.thompson.bins << "\n"
        << "ts_samples = " << r.thompson.samples << "\n"
        << "smc_particles = " << r.smc.particles << "\n"
        << "smc_challengers = " << r.smc.challengers << "\n"
        << "smc_rounds = " << r.smc.rounds << "\n"
        << "smc_mixture = " << format_double(r.smc.mixture) << "\n"
        << "smc_refresh_rounds = " << r.smc_refresh_rounds << "\n"
        << "ei_grid_points = " << r.ei_grid_points << "\n"
        << "ei_scattered_points = " << r.ei_scattered_points << "\n"
        << "direct_budget = " << m.direct_budget << "\n"
        << "observation_noise = " << format_double(m.observation_noise) << "\n"
        << "warm_start = " << b(m.warm_start) << "\n"
        << "normalize_inputs = " << b(m.normalize_inputs) << "\n"
        << "standardize_outputs = " << b(m.standardize_outputs) << "\n";
  }
  return out.str();
}

DiagnoseSpec parse_diagnose(std::istream& in) {
  const pt::ptree tree = read_tree(in);
  DiagnoseSpec spec;
  double lengthscale = spec.params.lengthscales(0);
  const std::string where = "top level";
  for (const auto& [key, node] : tree) {
    if (!node.empty()) throw ConfigError("section [" + key + "]: not allowed in a diagnose config");
    const std::string value = trim(node.data());
    if (key == "objective") {
      spec.objective = value;
    } else if (key == "observations") {
      spec.observations = positive(where, key, value);
    } else if (key == "features") {
      spec.features = positive(where, key, value);
    } else if (key == "lambda") {
      spec.lambda = non_negative_real(where, key, value);
    } else if (key == "optimizer_steps") {
      spec.steps = non_negative(where, key, value);
    } else if (key == "step_size") {
      spec.step_size = positive_real(where, key, value);
    } else if (key == "lengthscale") {
      lengthscale = positive_real(where, key, value);
    } else if (key == "signal_variance") {
      spec.params.signal_variance = positive_real(where, key, value);
    } else if (key == "noise_variance") {
      spec.params.noise_variance = positive_real(where, key, value);
    } else if (key == "posterior_samples") {
      spec.posterior_samples = positive(where, key, value);
    } else if (key == "gmd_samples") {
      spec.gmd_samples = positive(where, key, value);
    } else if (key == "reference_samples") {
      spec.reference_samples = positive(where, key, value);
    } else if (key == "bins") {
      spec.bins = spec.smc.bins = positive(where, key, value);
    } else if (key == "band_points") {
      spec.band_points = positive(where, key, value);
    } else if (key == "time_budget") {
      spec.time_budget = positive_real(where, key, value);
    } else if (key == "smc_particles") {
      spec.smc.particles = positive(where, key, value);
    } else if (key == "smc_challengers") {
      spec.smc.challengers = positive(where, key, value);
    } else if (key == "smc_rounds") {
      spec.smc.rounds = positive(where, key, value);
    } else if (key == "smc_mixture") {
      spec.smc.mixture = to_real(where, key, value);
      if (spec.smc.mixture < 0.0 || spec.smc.mixture > 1.0) fail(where, key, "must lie in [0, 1]");
    } else if (key == "seed") {
      spec.seed = to_integer<std::uint64_t>(where, key, value);
    } else if (key == "output_dir") {
      if (value.empty()) fail(where, key, "must not be empty");
      spec.output_dir = value;
    } else {
      fail(where, key, "unknown key");
    }
  }
  int dim = 0;
  try {
    dim = objective_by_name(spec.objective).dim;
  } catch (const std::invalid_argument&) {
    fail(where, "objective", "unknown objective '" + spec.objective + "'");
  }
  if (dim != 1) fail(where, "objective", "the GMD diagnostic needs a 1d objective");
  spec.params.lengthscales = Eigen::VectorXd::Constant(1, lengthscale);
  return spec;
}

DiagnoseSpec load_diagnose(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_diagnose(in);
}

}  // namespace rssgp
