#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "badac/core.hpp"
#include "badac/covariance.hpp"
#include "badac/errors.hpp"
#include "badac/logsum.hpp"

namespace badac {

// Reserved pseudo-label for the anomaly hypothesis in reports and argmax
// results. Ties between a class and the anomaly go to the class.
inline constexpr int kAnomalyLabel = -1;

namespace detail {

// Sum over points of log N(a_j | b_j, sa_j^2 + sb_j^2): the closed form of
// marginalizing the latent true value out of two Gaussian measurements of
// it under a flat prior. Inputs must be equal-length; no checks here.
inline double convolution_log_likelihood(std::span<const double> a_values,
                                         std::span<const double> a_sigmas,
                                         std::span<const double> b_values,
                                         std::span<const double> b_sigmas) {
  constexpr double log_two_pi = 1.8378770664093454835606594728112353;
  double ll = 0.0;
  for (std::size_t j = 0; j < a_values.size(); ++j) {
    const double var = a_sigmas[j] * a_sigmas[j] + b_sigmas[j] * b_sigmas[j];
    const double diff = a_values[j] - b_values[j];
    ll -= 0.5 * (log_two_pi + std::log(var) + diff * diff / var);
  }
  return ll;
}

}  // namespace detail

// log P(test values | one training instance), marginalized over the latent
// true curve. Symmetric in (test, train).
inline double pairwise_log_likelihood(const Instance& test, const Instance& train) {
  require(same_grid(test.grid, train.grid), errc::grid_mismatch,
          "test and training instance grids differ");
  return detail::convolution_log_likelihood(test.values, test.sigmas, train.values,
                                            train.sigmas);
}

// log P(test values | class) = log of the mean member likelihood, computed
// with a max-shifted stable log-sum. The class prior is not applied here.
inline double class_log_evidence(const Instance& test, const ClassModel& model) {
  require(!model.instances.empty(), errc::empty_class, "class model has no instances");
  require(same_grid(test.grid, model.grid()), errc::grid_mismatch,
          "test grid does not match class grid");
  std::vector<double> terms;
  terms.reserve(model.instances.size());
  for (const Instance& train : model.instances) {
    terms.push_back(detail::convolution_log_likelihood(test.values, test.sigmas,
                                                       train.values, train.sigmas));
  }
  return log_mean_exp(terms);
}

// Uniform anomaly likelihood: density 1/(upper - lower) per point over
// [lower, upper], zero outside.
struct TopHatPrior {
  double lower = 0.0;
  double upper = 1.0;
  double per_point_log_density = 0.0;  // always -log(upper - lower)
};

inline TopHatPrior make_tophat(double lower, double upper) {
  require(upper > lower, errc::degenerate_range, "top-hat needs upper > lower");
  return TopHatPrior{lower, upper, -std::log(upper - lower)};
}

// [a, b] spanning twice the observed value range, expanded about its midpoint.
inline TopHatPrior make_tophat_from_data(const Dataset& data) {
  require(!data.instances.empty(), errc::empty_dataset, "dataset has no instances");
  double lo = data.instances.front().values.front();
  double hi = lo;
  for (const Instance& inst : data.instances) {
    for (double v : inst.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  require(hi > lo, errc::degenerate_range, "observed value range has zero width");
  const double half = hi - lo;
  const double mid = 0.5 * (lo + hi);
  return make_tophat(mid - half, mid + half);
}

// Product of per-point top-hat densities; -inf when any value leaves [a, b].
inline double anomaly_log_likelihood(const Instance& test, const TopHatPrior& prior) {
  for (double v : test.values) {
    if (v < prior.lower || v > prior.upper) return kNegInf;
  }
  return static_cast<double>(test.size()) * prior.per_point_log_density;
}

// Contamination-calibrated anomaly height: the nearest-rank fraction-quantile
// of the known-class log evidence sums, so that ceil(fraction * N) instances
// have known-class evidence at or below it.
inline double calibrate_tophat_by_contamination(std::vector<double> known_log_evidence_sums,
                                                double fraction) {
  require(!known_log_evidence_sums.empty(), errc::empty_input,
          "no evidence sums to calibrate against");
  require(fraction > 0.0 && fraction < 1.0, errc::invalid_fraction,
          "contamination fraction must lie in (0, 1)");
  const std::size_t n = known_log_evidence_sums.size();
  auto rank = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(known_log_evidence_sums.begin(),
                   known_log_evidence_sums.begin() + (rank - 1),
                   known_log_evidence_sums.end());
  return known_log_evidence_sums[rank - 1];
}

// The anomaly hypothesis entering evidence normalization: either a data-range
// top-hat evaluated per instance, or a calibrated constant log-likelihood.
struct AnomalyHypothesis {
  std::optional<TopHatPrior> top_hat;
  double calibrated_log_likelihood = 0.0;
  double prior = 0.0;

  static AnomalyHypothesis from_tophat(TopHatPrior prior, double prior_prob) {
    return AnomalyHypothesis{prior, 0.0, prior_prob};
  }
  static AnomalyHypothesis from_calibrated(double log_likelihood, double prior_prob) {
    return AnomalyHypothesis{std::nullopt, log_likelihood, prior_prob};
  }

  double log_likelihood(const Instance& test) const {
    return top_hat ? anomaly_log_likelihood(test, *top_hat) : calibrated_log_likelihood;
  }
};

// Scoring result for one test instance. class_log_evidence entries carry the
// class prior folded in (comparable up to one shared constant); probabilities
// are normalized over all hypotheses present.
struct PosteriorReport {
  std::map<int, double> class_log_evidence;
  std::optional<double> anomaly_log_likelihood;
  std::map<int, double> class_probs;
  double anomaly_prob = 0.0;
  double anomaly_score = 0.0;  // -log sum of known-class evidence terms
  int argmax = kAnomalyLabel;
};

inline PosteriorReport posterior(const Instance& test, const std::vector<ClassModel>& models,
                                 const std::optional<AnomalyHypothesis>& anomaly = std::nullopt) {
  require(!models.empty(), errc::empty_class, "no class models supplied");
  double prior_sum = anomaly ? anomaly->prior : 0.0;
  for (const ClassModel& model : models) prior_sum += model.prior;
  require(std::abs(prior_sum - 1.0) <= 1e-9, errc::prior_sum_violation,
          "hypothesis priors must sum to 1");

  PosteriorReport report;
  std::vector<double> terms;
  terms.reserve(models.size() + 1);
  for (const ClassModel& model : models) {
    const double term = class_log_evidence(test, model) + std::log(model.prior);
    report.class_log_evidence[model.class_id] = term;
    terms.push_back(term);
  }
  report.anomaly_score = -log_sum_exp(terms);

  if (anomaly) {
    report.anomaly_log_likelihood = anomaly->log_likelihood(test);
    terms.push_back(*report.anomaly_log_likelihood + std::log(anomaly->prior));
  }
  const double log_z = log_sum_exp(terms);
  require(std::isfinite(log_z), errc::numeric_failure,
          "evidence normalization is not finite");

  double best = kNegInf;
  for (const auto& [class_id, term] : report.class_log_evidence) {
    const double p = std::exp(term - log_z);
    report.class_probs[class_id] = p;
    if (p > best) {
      best = p;
      report.argmax = class_id;
    }
  }
  if (anomaly) {
    report.anomaly_prob = std::exp(*report.anomaly_log_likelihood +
                                   std::log(anomaly->prior) - log_z);
    if (report.anomaly_prob > best) report.argmax = kAnomalyLabel;
  }
  return report;
}

struct RankedInstance {
  std::size_t index = 0;
  double anomaly_score = 0.0;
};

// Instances ordered most-anomalous first: descending -log sum_k P(data|k)P(k),
// ties broken by ascending index.
inline std::vector<RankedInstance> rank_anomalies(const std::vector<Instance>& tests,
                                                  const std::vector<ClassModel>& models) {
  require(!tests.empty(), errc::empty_input, "no test instances to rank");
  std::vector<RankedInstance> ranked;
  ranked.reserve(tests.size());
  for (std::size_t i = 0; i < tests.size(); ++i) {
    std::vector<double> terms;
    terms.reserve(models.size());
    for (const ClassModel& model : models) {
      terms.push_back(class_log_evidence(tests[i], model) + std::log(model.prior));
    }
    ranked.push_back({i, -log_sum_exp(terms)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedInstance& a, const RankedInstance& b) {
    if (a.anomaly_score != b.anomaly_score) return a.anomaly_score > b.anomaly_score;
    return a.index < b.index;
  });
  return ranked;
}

// Online class growth. When the anomaly hypothesis beats every class, the
// instance seeds a new class (priors reset to uniform over the enlarged class
// set). Otherwise the instance joins the argmax class only when that class is
// near-certain; ambiguous instances leave the models untouched.
inline std::vector<ClassModel> online_update(std::vector<ClassModel> models,
                                             const Instance& test,
                                             const PosteriorReport& report,
                                             double admission_threshold = 0.99) {
  bool anomaly_wins = report.anomaly_prob > 0.0;
  int best_class = kAnomalyLabel;
  double best_prob = kNegInf;
  for (const auto& [class_id, p] : report.class_probs) {
    if (report.anomaly_prob <= p) anomaly_wins = false;
    if (p > best_prob) {
      best_prob = p;
      best_class = class_id;
    }
  }

  if (anomaly_wins) {
    int new_id = 0;
    for (const ClassModel& model : models) new_id = std::max(new_id, model.class_id + 1);
    const double uniform = 1.0 / static_cast<double>(models.size() + 1);
    models.push_back(make_class_model(new_id, {test}, uniform));
    for (ClassModel& model : models) model.prior = uniform;
    return models;
  }

  if (best_prob > admission_threshold) {
    for (ClassModel& model : models) {
      if (model.class_id == best_class) {
        model = merge_into_class(std::move(model), test);
        break;
      }
    }
  }
  return models;
}

// Per-point inverse-variance compression of a class into (mean, sigma).
inline TemplateModel compress_to_template(const ClassModel& model) {
  require(!model.instances.empty(), errc::empty_class, "cannot compress an empty class");
  const std::size_t m = model.grid().size();
  TemplateModel tmpl{model.class_id, model.grid(), std::vector<double>(m, 0.0),
                     std::vector<double>(m, 0.0), model.prior};
  for (std::size_t j = 0; j < m; ++j) {
    double precision = 0.0;
    double weighted = 0.0;
    for (const Instance& inst : model.instances) {
      const double w = 1.0 / (inst.sigmas[j] * inst.sigmas[j]);
      precision += w;
      weighted += inst.values[j] * w;
    }
    tmpl.sigma[j] = std::sqrt(1.0 / precision);
    tmpl.mean[j] = weighted / precision;
  }
  return tmpl;
}

// log P(test | template): the same Gaussian convolution against the
// compressed class summary.
inline double template_log_likelihood(const Instance& test, const TemplateModel& tmpl) {
  require(same_grid(test.grid, tmpl.grid), errc::grid_mismatch,
          "test grid does not match template grid");
  return detail::convolution_log_likelihood(test.values, test.sigmas, tmpl.mean, tmpl.sigma);
}

// Multivariate Gaussian log-density of (test - template mean) under
// cov + diag(test sigma^2) + diag(template sigma^2), via Cholesky.
// With a zero covariance this reduces to template_log_likelihood.
inline double correlated_log_likelihood(const Instance& test, const TemplateModel& tmpl,
                                        const CovarianceModel& cov) {
  require(same_grid(test.grid, tmpl.grid), errc::grid_mismatch,
          "test grid does not match template grid");
  require(cov.dim == test.size(), errc::dimension_mismatch,
          "covariance dimension does not match instance length");
  const auto m = static_cast<Eigen::Index>(test.size());
  Eigen::MatrixXd total = cov.matrix();
  Eigen::VectorXd residual(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    total(j, j) += test.sigmas[j] * test.sigmas[j] + tmpl.sigma[j] * tmpl.sigma[j];
    residual(j) = test.values[j] - tmpl.mean[j];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(total);
  require(llt.info() == Eigen::Success, errc::non_psd_covariance,
          "combined covariance is not positive definite");
  const Eigen::VectorXd half = llt.matrixL().solve(residual);
  double log_det = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) log_det += std::log(llt.matrixL()(j, j));
  return -0.5 * (static_cast<double>(m) * std::log(2.0 * std::numbers::pi) +
                 half.squaredNorm()) - log_det;
}

}  // namespace badac
