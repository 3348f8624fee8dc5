#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "badac/errors.hpp"

namespace badac {

enum class ExperimentKind { gaussian, compact, non_gaussian, correlated };

enum class AnomalyPriorMode { tophat_range, contamination_calibrated };

inline const char* experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::gaussian: return "gaussian";
    case ExperimentKind::compact: return "compact";
    case ExperimentKind::non_gaussian: return "non_gaussian";
    case ExperimentKind::correlated: return "correlated";
  }
  return "unknown";
}

inline ExperimentKind experiment_kind_from_name(const std::string& name) {
  if (name == "gaussian") return ExperimentKind::gaussian;
  if (name == "compact") return ExperimentKind::compact;
  if (name == "non_gaussian") return ExperimentKind::non_gaussian;
  if (name == "correlated") return ExperimentKind::correlated;
  fail(errc::config_invalid, "unknown experiment kind '" + name + "'");
}

inline const char* anomaly_prior_mode_name(AnomalyPriorMode mode) {
  return mode == AnomalyPriorMode::tophat_range ? "tophat_range" : "contamination_calibrated";
}

inline AnomalyPriorMode anomaly_prior_mode_from_name(const std::string& name) {
  if (name == "tophat_range") return AnomalyPriorMode::tophat_range;
  if (name == "contamination_calibrated") return AnomalyPriorMode::contamination_calibrated;
  fail(errc::config_invalid, "unknown anomaly prior mode '" + name + "'");
}

// Everything a run needs to be reproducible: the experiment recipe, sizes,
// the seed, and scoring options.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::gaussian;
  std::size_t n_train = 2000;
  std::size_t n_test = 2000;
  double outlier_fraction = 0.01;
  std::size_t grid_points = 50;
  std::uint64_t seed = 0xBADAC;
  std::optional<AnomalyPriorMode> anomaly_prior;  // defaulted per kind, see below
  double contamination_fraction = 0.01;
  std::optional<std::size_t> rws_n;  // default: true outlier count in the test set
  std::vector<std::string> algorithms = {"badac", "knn"};
  std::size_t knn_k = 10;
  double admission_threshold = 0.99;
  std::size_t threads = 1;
};

// The range top-hat suits experiments where the noise model is right; the
// contamination calibration is for the model-mismatch experiments, where a
// naive top-hat height would dominate every instance.
inline AnomalyPriorMode effective_anomaly_prior(const ExperimentConfig& config) {
  if (config.anomaly_prior) return *config.anomaly_prior;
  const bool mismatch = config.kind == ExperimentKind::non_gaussian ||
                        config.kind == ExperimentKind::correlated;
  return mismatch ? AnomalyPriorMode::contamination_calibrated
                  : AnomalyPriorMode::tophat_range;
}

inline void validate_config(const ExperimentConfig& config) {
  require(config.n_train >= 1 && config.n_test >= 1, errc::config_invalid,
          "train and test counts must be >= 1");
  require(config.outlier_fraction >= 0.0 && config.outlier_fraction < 1.0,
          errc::invalid_fraction, "outlier fraction must lie in [0, 1)");
  require(config.grid_points >= 2, errc::config_invalid, "grid needs at least two points");
  require(config.contamination_fraction > 0.0 && config.contamination_fraction < 1.0,
          errc::invalid_fraction, "contamination fraction must lie in (0, 1)");
  require(!config.algorithms.empty(), errc::config_invalid, "algorithm list is empty");
  for (const std::string& algorithm : config.algorithms) {
    require(algorithm == "badac" || algorithm == "knn", errc::config_invalid,
            "unknown algorithm '" + algorithm + "'");
  }
  require(config.knn_k >= 1, errc::config_invalid, "knn_k must be >= 1");
  require(config.admission_threshold > 0.0 && config.admission_threshold <= 1.0,
          errc::config_invalid, "admission threshold must lie in (0, 1]");
  require(config.threads >= 1, errc::config_invalid, "threads must be >= 1");
}

}  // namespace badac
