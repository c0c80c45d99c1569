#include "slicematch/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <omp.h>

namespace slicematch {

namespace {

constexpr std::uint64_t kRunStreamTag = 0x5EED;
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kDynamicsStream = 1;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T v{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(key), "cannot parse '" + std::string(text) + "'");
  }
  return v;
}

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number<T>(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

struct Job {
  std::size_t cell;
  int run_id;
  SamplingMode mode;
};

RunLog run_one(const ExperimentConfig& cfg, Index d, double alpha, int run_id, SamplingMode mode) {
  const RngStream base = run_stream(cfg.seed, d, run_id);
  RngStream init = base.substream(kInitStream);
  const RngStream dynamics = base.substream(kDynamicsStream);
  const StepSchedule schedule{alpha, cfg.offset};
  RunLog log;
  log.run_id = run_id;
  log.mode = mode;

  switch (cfg.experiment) {
    case ExperimentKind::GaussIsotropic:
    case ExperimentKind::GaussGeneral:
    case ExperimentKind::SingleVsBasis: {
      const GaussianState sigma0(init_source_covariance(d, init));
      const GaussianState lambda(cfg.experiment == ExperimentKind::GaussGeneral ? init_general_target(d, init)
                                                                                 : Matrix::Identity(d, d));
      const FlowConfig fc{schedule, cfg.K, mode, cfg.eval_every, cfg.L_sw};
      log.records = run_gaussian_flow(sigma0, lambda, fc, dynamics);
      break;
    }
    case ExperimentKind::ParticlesMixture:
    case ExperimentKind::ParticlesGaussTarget: {
      const bool mixture = cfg.experiment == ExperimentKind::ParticlesMixture;
      const ParticleCloud src = mixture ? init_gaussian_mixture_cloud(d, cfg.n_particles, init)
                                        : sample_gaussian_cloud(init_source_covariance(d, init), cfg.n_particles, init);
      const ParticleCloud tgt = mixture ? init_gaussian_mixture_cloud(d, cfg.n_particles, init)
                                        : sample_gaussian_cloud(Matrix::Identity(d, d), cfg.n_particles, init);
      const SchemeConfig sc{schedule, cfg.K, mode, cfg.eval_every, cfg.L_sw};
      log.records = run_scheme(src, tgt, sc, dynamics).records;
      break;
    }
    case ExperimentKind::Diagnostics:
      throw std::logic_error("run_one: diagnostics has no per-run logs");
  }
  return log;
}

void write_summary_cell(std::ostream& out, const ExperimentConfig& cfg, const CellResult& cell) {
  for (SamplingMode mode : {SamplingMode::OrthonormalBasis, SamplingMode::SingleDirection}) {
    std::vector<double> first;
    std::vector<double> last;
    for (const auto& run : cell.runs) {
      if (run.mode != mode) continue;
      first.push_back(run.records.front().sw2sq);
      last.push_back(run.records.back().sw2sq);
    }
    if (last.empty()) continue;
    out << "cell d=" << cell.dim << " alpha=" << format_number(cell.alpha) << " mode=" << to_string(mode)
        << " runs=" << last.size() << " initial_sw2sq_mean=" << format_number(mean_of(first))
        << " final_sw2sq_mean=" << format_number(mean_of(last))
        << " final_sw2sq_min=" << format_number(*std::min_element(last.begin(), last.end()))
        << " final_sw2sq_max=" << format_number(*std::max_element(last.begin(), last.end())) << '\n';
  }
  if (cfg.experiment != ExperimentKind::SingleVsBasis) return;
  int larger = 0;
  int pairs = 0;
  for (std::size_t i = 0; i + 1 < cell.runs.size(); i += 2) {
    const double vb = lambda_min_window_variance(cell.runs[i].records, 1, cfg.K);
    const double vs = lambda_min_window_variance(cell.runs[i + 1].records, 1, cfg.K);
    larger += vs > vb ? 1 : 0;
    ++pairs;
  }
  out << "lambda_min_variance d=" << cell.dim << " alpha=" << format_number(cell.alpha)
      << " single_larger=" << larger << "/" << pairs << '\n';
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::GaussIsotropic: return "gauss-isotropic";
    case ExperimentKind::GaussGeneral: return "gauss-general";
    case ExperimentKind::ParticlesMixture: return "particles-mixture";
    case ExperimentKind::ParticlesGaussTarget: return "particles-gauss-target";
    case ExperimentKind::SingleVsBasis: return "single-vs-basis";
    case ExperimentKind::Diagnostics: return "diagnostics";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (auto k : {ExperimentKind::GaussIsotropic, ExperimentKind::GaussGeneral, ExperimentKind::ParticlesMixture,
                 ExperimentKind::ParticlesGaussTarget, ExperimentKind::SingleVsBasis, ExperimentKind::Diagnostics}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("experiment", "unknown experiment '" + std::string(text) + "'");
}

void ExperimentConfig::validate() const {
  if (dims.empty()) throw ConfigError("dims", "need at least one dimension");
  for (Index d : dims)
    if (d < 1) throw ConfigError("dims", "dimensions must be >= 1");
  if (alphas.empty()) throw ConfigError("alphas", "need at least one value");
  for (double a : alphas)
    if (!(a >= 0.0 && a < 1.0)) throw ConfigError("alphas", "values must lie in [0, 1)");
  if (K < 1) throw ConfigError("K", "must be >= 1");
  if (n_runs < 1) throw ConfigError("n_runs", "must be >= 1");
  if (n_particles < 1) throw ConfigError("n_particles", "must be >= 1");
  if (L_sw < 1) throw ConfigError("L_sw", "must be >= 1");
  if (eval_every < 1) throw ConfigError("eval_every", "must be >= 1");
  if (!(offset >= 1.0)) throw ConfigError("offset", "must be >= 1");
  if (workers < 0) throw ConfigError("workers", "must be >= 0");
  if (out_dir.empty()) throw ConfigError("out_dir", "must not be empty");
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  value = trim(value);
  const std::string k(key);
  if (key == "experiment") {
    cfg.experiment = parse_experiment_kind(value);
  } else if (key == "dims") {
    cfg.dims.clear();
    for (long d : parse_list<long>(key, value)) cfg.dims.push_back(static_cast<Index>(d));
  } else if (key == "alphas") {
    cfg.alphas = parse_list<double>(key, value);
  } else if (key == "K") {
    cfg.K = parse_number<std::int64_t>(key, value);
  } else if (key == "n_runs") {
    cfg.n_runs = parse_number<int>(key, value);
  } else if (key == "n_particles") {
    cfg.n_particles = static_cast<Index>(parse_number<long>(key, value));
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "L_sw") {
    cfg.L_sw = parse_number<std::int64_t>(key, value);
  } else if (key == "eval_every") {
    cfg.eval_every = parse_number<std::int64_t>(key, value);
  } else if (key == "offset") {
    cfg.offset = parse_number<double>(key, value);
  } else if (key == "out_dir") {
    if (value.empty()) throw ConfigError(k, "must not be empty");
    cfg.out_dir = std::string(value);
  } else if (key == "workers") {
    cfg.workers = parse_number<int>(key, value);
  } else {
    throw ConfigError(k, "unknown configuration key");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    set_config_value(cfg, trim(view.substr(0, eq)), view.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  return parse_config(in);
}

Matrix init_source_covariance(Index d, RngStream& rng) { return random_spd(d, 0.1, 10.0, rng); }

ParticleCloud init_gaussian_mixture_cloud(Index d, Index n, RngStream& rng) {
  if (d < 1 || n < 1) throw std::invalid_argument("init_gaussian_mixture_cloud: d and n must be >= 1");
  constexpr int kComponents = 3;
  Matrix means(d, kComponents);
  for (int c = 0; c < kComponents; ++c)
    for (Index j = 0; j < d; ++j) means(j, c) = -5.0 + 10.0 * rng.uniform();
  PointMatrix x(n, d);
  for (Index i = 0; i < n; ++i) {
    const int c = std::min(kComponents - 1, static_cast<int>(rng.uniform() * kComponents));
    for (Index j = 0; j < d; ++j) x(i, j) = means(j, c) + rng.normal();
  }
  return ParticleCloud(std::move(x));
}

ParticleCloud sample_gaussian_cloud(const Matrix& cov, Index n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_gaussian_cloud: n must be >= 1");
  const Matrix root = psd_sqrt(cov);
  const Index d = cov.rows();
  PointMatrix x(n, d);
  Vector z(d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) z(j) = rng.normal();
    x.row(i) = (root * z).transpose();
  }
  return ParticleCloud(std::move(x));
}

Matrix init_general_target(Index d, RngStream& rng) {
  Vector diag(d);
  for (Index i = 0; i < d; ++i) {
    do {
      diag(i) = 10.0 + rng.normal();
    } while (!(diag(i) > 0.0));
  }
  return diag.asDiagonal();
}

RngStream run_stream(std::uint64_t seed, Index d, int run_id) {
  return RngStream(seed, kRunStreamTag)
      .substream(static_cast<std::uint64_t>(d))
      .substream(static_cast<std::uint64_t>(run_id));
}

std::string format_number(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

CellResult run_cell(const ExperimentConfig& cfg, Index d, double alpha) {
  if (cfg.experiment == ExperimentKind::Diagnostics) throw std::invalid_argument("run_cell: not a grid experiment");
  CellResult cell{d, alpha, {}};
  for (int r = 0; r < cfg.n_runs; ++r) {
    if (cfg.experiment == ExperimentKind::SingleVsBasis) {
      cell.runs.push_back(run_one(cfg, d, alpha, r, SamplingMode::OrthonormalBasis));
      cell.runs.push_back(run_one(cfg, d, alpha, r, SamplingMode::SingleDirection));
    } else {
      cell.runs.push_back(run_one(cfg, d, alpha, r, SamplingMode::OrthonormalBasis));
    }
  }
  return cell;
}

void write_cell_csv(std::ostream& out, const ExperimentConfig& cfg, const CellResult& cell) {
  out << kCsvHeader << '\n';
  const std::string prefix_seed = std::to_string(cfg.seed);
  const std::string dim = std::to_string(cell.dim);
  const std::string alpha = format_number(cell.alpha);
  const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& run : cell.runs) {
    for (const auto& r : run.records) {
      out << run.run_id << ',' << prefix_seed << ',' << dim << ',' << alpha << ',' << to_string(run.mode) << ','
          << r.k << ',' << format_number(r.gamma) << ',' << format_number(r.sw2sq) << ',' << opt(r.lambda_min)
          << ',' << opt(r.lambda_max) << ',' << format_number(r.m2) << '\n';
    }
  }
}

std::string cell_file_name(ExperimentKind kind, Index d, double alpha) {
  return std::string(to_string(kind)) + "_d" + std::to_string(d) + "_a" + format_number(alpha) + ".csv";
}

SuiteSizes suite_sizes_for(const ExperimentConfig& cfg) {
  SuiteSizes s;
  s.seed = cfg.seed;
  s.flow_runs = cfg.n_runs;
  s.flow_iterations = cfg.K;
  return s;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  ExperimentOutcome outcome;
  outcome.summary = cfg.out_dir / "summary.txt";
  std::ostringstream summary;
  summary << "experiment " << to_string(cfg.experiment) << "\nseed " << cfg.seed << '\n';

  const auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
  };

  if (cfg.experiment == ExperimentKind::Diagnostics) {
    const auto reports = run_diagnostics_suite(suite_sizes_for(cfg));
    const auto path = cfg.out_dir / "diagnostics.tsv";
    auto f = open(path);
    f << "name\tpassed\tlhs\trhs\tslack\n";
    for (const auto& r : reports) {
      f << format_report(r) << '\n';
      summary << "check " << r.name << ' ' << (r.passed ? "passed" : "FAILED") << '\n';
      outcome.checks_passed = outcome.checks_passed && r.passed;
    }
    if (!f) throw std::runtime_error("write failed: " + path.string());
    outcome.files.push_back(path);
  } else {
    struct Cell {
      Index d;
      double alpha;
    };
    std::vector<Cell> cells;
    for (Index d : cfg.dims)
      for (double a : cfg.alphas) cells.push_back({d, a});
    std::vector<Job> jobs;
    const bool paired = cfg.experiment == ExperimentKind::SingleVsBasis;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      for (int r = 0; r < cfg.n_runs; ++r) {
        jobs.push_back({c, r, SamplingMode::OrthonormalBasis});
        if (paired) jobs.push_back({c, r, SamplingMode::SingleDirection});
      }
    }
    std::vector<RunLog> logs(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      try {
        const Cell& cell = cells[jobs[j].cell];
        logs[j] = run_one(cfg, cell.d, cell.alpha, jobs[j].run_id, jobs[j].mode);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);

    std::size_t j = 0;
    for (const Cell& c : cells) {
      CellResult result{c.d, c.alpha, {}};
      while (j < jobs.size() && &cells[jobs[j].cell] == &c) result.runs.push_back(std::move(logs[j++]));
      const auto path = cfg.out_dir / cell_file_name(cfg.experiment, c.d, c.alpha);
      auto f = open(path);
      write_cell_csv(f, cfg, result);
      if (!f) throw std::runtime_error("write failed: " + path.string());
      outcome.files.push_back(path);
      write_summary_cell(summary, cfg, result);
    }
  }

  auto f = open(outcome.summary);
  f << summary.str();
  if (!f) throw std::runtime_error("write failed: " + outcome.summary.string());
  return outcome;
}

}  // namespace slicematch
