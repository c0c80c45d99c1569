#pragma once

// Experiment grid runner: configuration, initial conditions, CSV logs and a
// plain-text summary.

#include "slicematch/diagnostics.hpp"
#include "slicematch/gaussianflow.hpp"
#include "slicematch/measures.hpp"
#include "slicematch/randgeom.hpp"
#include "slicematch/scheme.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slicematch {

enum class ExperimentKind {
  GaussIsotropic,
  GaussGeneral,
  ParticlesMixture,
  ParticlesGaussTarget,
  SingleVsBasis,
  Diagnostics,
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

/// Raised for unknown keys, malformed values and out-of-range settings.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::GaussIsotropic;
  std::vector<Index> dims{5};
  std::vector<double> alphas{0.51};
  std::int64_t K = 1000;
  int n_runs = 10;
  Index n_particles = 500;
  std::uint64_t seed = 0;
  std::int64_t L_sw = 500;
  std::int64_t eval_every = 10;
  double offset = 1.0;
  std::filesystem::path out_dir = "out";
  int workers = 0;  // 0: one per available core

  // Throws ConfigError naming the first offending key.
  void validate() const;
};

/// Sets one key from its textual value, as written in a config file.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Flat `key = value` lines; `#` starts a comment; lists are comma separated.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Q diag(s) Qᵀ with Q Haar and s log-uniform on [0.1, 10].
Matrix init_source_covariance(Index d, RngStream& rng);

/// n points from an equal-weight mixture of three unit-variance Gaussians with
/// means uniform in [-5, 5]^d.
ParticleCloud init_gaussian_mixture_cloud(Index d, Index n, RngStream& rng);

/// n points from N(0, cov).
ParticleCloud sample_gaussian_cloud(const Matrix& cov, Index n, RngStream& rng);

/// Diagonal Λ with entries from N(10, 1), negative draws discarded.
Matrix init_general_target(Index d, RngStream& rng);

inline constexpr std::string_view kCsvHeader = "run_id,seed,dim,alpha,mode,k,gamma,sw2sq,lambda_min,lambda_max,m2";

struct RunLog {
  int run_id = 0;
  SamplingMode mode = SamplingMode::OrthonormalBasis;
  std::vector<RunRecord> records;
};

/// All runs for one (experiment, d, α) cell of the grid.
struct CellResult {
  Index dim = 0;
  double alpha = 0.0;
  std::vector<RunLog> runs;
};

/// Stream that drives run `run_id` in dimension d. Equal for every α, so the
/// α-sweep shares initial conditions and basis sequences.
RngStream run_stream(std::uint64_t seed, Index d, int run_id);

/// Computes one cell without touching the filesystem.
CellResult run_cell(const ExperimentConfig& cfg, Index d, double alpha);

void write_cell_csv(std::ostream& out, const ExperimentConfig& cfg, const CellResult& cell);
std::string cell_file_name(ExperimentKind kind, Index d, double alpha);

struct ExperimentOutcome {
  std::vector<std::filesystem::path> files;
  std::filesystem::path summary;
  bool checks_passed = true;  // false if any diagnostics check failed
};

/// Runs the whole grid and writes one CSV per cell plus summary.txt into out_dir.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

/// Sizes used by the diagnostics experiment for a given config.
SuiteSizes suite_sizes_for(const ExperimentConfig& cfg);

// Shortest round-trip decimal form, as used in every output file.
std::string format_number(double v);

}  // namespace slicematch
