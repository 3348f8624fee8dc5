#pragma once

#include <stdexcept>
#include <string>

namespace badac {

// Failure categories. Each maps to one named contract violation so callers
// (and tests) can distinguish them without parsing messages.
enum class errc {
  length_mismatch,
  non_positive_sigma,
  non_monotone_grid,
  grid_mismatch,
  empty_class,
  empty_dataset,
  empty_input,
  degenerate_range,
  prior_sum_violation,
  invalid_fraction,
  n_exceeds_list,
  single_class_truth,
  non_psd_covariance,
  dimension_mismatch,
  m_too_small,
  bounds_too_narrow,
  missing_columns,
  missing_metric,
  config_invalid,
  io_failure,
  numeric_failure,
};

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::length_mismatch: return "length-mismatch";
    case errc::non_positive_sigma: return "non-positive-sigma";
    case errc::non_monotone_grid: return "non-monotone-grid";
    case errc::grid_mismatch: return "grid-mismatch";
    case errc::empty_class: return "empty-class";
    case errc::empty_dataset: return "empty-dataset";
    case errc::empty_input: return "empty-input";
    case errc::degenerate_range: return "degenerate-range";
    case errc::prior_sum_violation: return "prior-sum-violation";
    case errc::invalid_fraction: return "invalid-fraction";
    case errc::n_exceeds_list: return "N-exceeds-list";
    case errc::single_class_truth: return "single-class-truth";
    case errc::non_psd_covariance: return "non-psd-covariance";
    case errc::dimension_mismatch: return "dimension-mismatch";
    case errc::m_too_small: return "m-too-small";
    case errc::bounds_too_narrow: return "bounds-too-narrow";
    case errc::missing_columns: return "missing-columns";
    case errc::missing_metric: return "missing-metric";
    case errc::config_invalid: return "config-invalid";
    case errc::io_failure: return "io-failure";
    case errc::numeric_failure: return "numeric-failure";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw error(code, what);
}

inline void require(bool ok, errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace badac
