#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "badac/baselines.hpp"
#include "badac/config.hpp"
#include "badac/core.hpp"
#include "badac/engine.hpp"
#include "badac/io.hpp"
#include "badac/logsum.hpp"
#include "badac/metrics.hpp"
#include "badac/simulate.hpp"

namespace badac {

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(threads, 1);
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

// Groups labeled training instances into one model per class, ascending id.
inline std::vector<ClassModel> build_class_models(const Dataset& train, double prior_each) {
  std::map<int, std::vector<Instance>> groups;
  for (const Instance& inst : train.instances) {
    require(inst.label.has_value(), errc::config_invalid,
            "training instances must carry labels");
    groups[*inst.label].push_back(inst);
  }
  require(!groups.empty(), errc::empty_dataset, "no labeled training instances");
  std::vector<ClassModel> models;
  models.reserve(groups.size());
  for (auto& [class_id, members] : groups) {
    models.push_back(make_class_model(class_id, std::move(members), prior_each));
  }
  return models;
}

// Argmax over the known classes only, ignoring the anomaly hypothesis.
inline int argmax_class(const PosteriorReport& report) {
  int best = kAnomalyLabel;
  double best_term = kNegInf;
  for (const auto& [class_id, term] : report.class_log_evidence) {
    if (term > best_term) {
      best_term = term;
      best = class_id;
    }
  }
  return best;
}

// P(class | one of the known classes): classification-only normalization.
inline double class_only_prob(const PosteriorReport& report, int class_id) {
  std::vector<double> terms;
  terms.reserve(report.class_log_evidence.size());
  for (const auto& [id, term] : report.class_log_evidence) terms.push_back(term);
  const double log_z = log_sum_exp(terms);
  const auto it = report.class_log_evidence.find(class_id);
  if (it == report.class_log_evidence.end()) return 0.0;
  return std::exp(it->second - log_z);
}

struct AlgorithmMetrics {
  std::string algorithm;
  std::optional<double> auc_anomaly;
  std::optional<double> mcc_anomaly;
  std::optional<double> rws_anomaly;
  double accuracy_pooled = 0.0;
  double accuracy_macro = 0.0;
  std::vector<RocPoint> roc;
  CalibrationCurve calibration;
  // Wall-clock seconds. BADAC has no fit/score split and reports total only.
  double fit_seconds = 0.0;
  double score_seconds = 0.0;
  double total_seconds = 0.0;
};

struct MetricsReport {
  ExperimentConfig config;
  std::uint64_t config_hash_value = 0;
  std::vector<int> known_classes;
  std::size_t n_outliers = 0;
  std::optional<std::size_t> rws_n;  // empty when no anomalies to rank
  double simulate_seconds = 0.0;
  std::vector<int> test_truth;
  std::vector<char> truth_outlier;
  std::vector<PosteriorReport> badac_rows;      // empty unless badac ran
  std::vector<double> knn_scores;               // empty unless knn ran
  std::vector<std::map<int, double>> knn_probs;
  std::vector<AlgorithmMetrics> algorithms;

  const AlgorithmMetrics* find(const std::string& name) const {
    for (const AlgorithmMetrics& m : algorithms) {
      if (m.algorithm == name) return &m;
    }
    return nullptr;
  }
};

namespace detail {

// The class whose probability the calibration curve tracks (the quadratic
// inlier class in the standard experiments).
inline int calibration_class(const std::vector<int>& known_classes) {
  for (int id : known_classes) {
    if (id == 1) return 1;
  }
  return known_classes.back();
}

struct AnomalyMetricInputs {
  std::vector<double> scores;   // larger = more anomalous
  std::vector<char> flagged;    // hard anomaly calls
  std::vector<int> predicted;   // class argmax, ignoring the anomaly hypothesis
  std::vector<double> calibration_probs;
};

inline AlgorithmMetrics evaluate_algorithm(
    const std::string& name, const AnomalyMetricInputs& inputs, const MetricsReport& report) {
  AlgorithmMetrics out;
  out.algorithm = name;

  std::vector<int> outlier_truth(report.test_truth.size());
  for (std::size_t i = 0; i < outlier_truth.size(); ++i) {
    outlier_truth[i] = report.truth_outlier[i] ? 1 : 0;
  }
  const bool both_classes =
      report.n_outliers > 0 && report.n_outliers < report.test_truth.size();
  if (both_classes) {
    out.roc = roc_curve(inputs.scores, outlier_truth);
    out.auc_anomaly = auc(out.roc);
    const auto indicators =
        ranked_indicators(RankedPredictions{inputs.scores, outlier_truth});
    const std::size_t n_expected = report.rws_n.value_or(report.n_outliers);
    out.rws_anomaly = rws(indicators, n_expected);
    double tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < outlier_truth.size(); ++i) {
      if (inputs.flagged[i]) {
        (outlier_truth[i] ? tp : fp) += 1.0;
      } else {
        (outlier_truth[i] ? fn : tn) += 1.0;
      }
    }
    out.mcc_anomaly = mcc(tp, tn, fp, fn);
  }

  // Classification over instances whose true class was trained on.
  std::vector<int> predicted_inlier;
  std::vector<int> truth_inlier;
  std::map<int, std::pair<std::size_t, std::size_t>> per_class;  // correct, total
  for (std::size_t i = 0; i < report.test_truth.size(); ++i) {
    if (report.truth_outlier[i]) continue;
    predicted_inlier.push_back(inputs.predicted[i]);
    truth_inlier.push_back(report.test_truth[i]);
    auto& [correct, total] = per_class[report.test_truth[i]];
    ++total;
    if (inputs.predicted[i] == report.test_truth[i]) ++correct;
  }
  if (!predicted_inlier.empty()) {
    out.accuracy_pooled = accuracy(predicted_inlier, truth_inlier);
    double macro = 0.0;
    for (const auto& [class_id, counts] : per_class) {
      macro += static_cast<double>(counts.first) / static_cast<double>(counts.second);
    }
    out.accuracy_macro = macro / static_cast<double>(per_class.size());
  }

  const int target = calibration_class(report.known_classes);
  std::vector<int> target_truth(report.test_truth.size());
  for (std::size_t i = 0; i < target_truth.size(); ++i) {
    target_truth[i] = report.test_truth[i] == target ? 1 : 0;
  }
  out.calibration = calibration_curve(inputs.calibration_probs, target_truth);
  return out;
}

}  // namespace detail

// BADAC scoring of a test set: builds the anomaly hypothesis per the
// configured mode, then evaluates the posterior for every instance.
// Priors are uniform over the known classes plus the anomaly hypothesis.
struct BadacScores {
  std::vector<PosteriorReport> reports;
  AnomalyHypothesis hypothesis;
};

inline BadacScores score_badac(const std::vector<ClassModel>& models_in,
                               const Dataset& train, const Dataset& test,
                               const ExperimentConfig& config) {
  std::vector<ClassModel> models = models_in;
  const double uniform = 1.0 / static_cast<double>(models.size() + 1);
  for (ClassModel& model : models) model.prior = uniform;

  AnomalyHypothesis hypothesis;
  if (effective_anomaly_prior(config) == AnomalyPriorMode::tophat_range) {
    Dataset observed;
    observed.instances.reserve(train.instances.size() + test.instances.size());
    observed.instances.insert(observed.instances.end(), train.instances.begin(),
                              train.instances.end());
    observed.instances.insert(observed.instances.end(), test.instances.begin(),
                              test.instances.end());
    hypothesis = AnomalyHypothesis::from_tophat(make_tophat_from_data(observed), uniform);
  } else {
    // Calibration pass: known-class evidence sums with the final priors.
    std::vector<double> evidence_sums(test.instances.size());
    detail::parallel_for(test.instances.size(), config.threads, [&](std::size_t i) {
      std::vector<double> terms;
      terms.reserve(models.size());
      for (const ClassModel& model : models) {
        terms.push_back(class_log_evidence(test.instances[i], model) +
                        std::log(model.prior));
      }
      evidence_sums[i] = log_sum_exp(terms);
    });
    const double height =
        calibrate_tophat_by_contamination(evidence_sums, config.contamination_fraction);
    // The calibrated value is the anomaly term including its prior weight.
    hypothesis = AnomalyHypothesis::from_calibrated(height - std::log(uniform), uniform);
  }

  BadacScores scores;
  scores.hypothesis = hypothesis;
  scores.reports.resize(test.instances.size());
  detail::parallel_for(test.instances.size(), config.threads, [&](std::size_t i) {
    scores.reports[i] = posterior(test.instances[i], models, hypothesis);
  });
  return scores;
}

inline MetricsReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  MetricsReport report;
  report.config = config;
  report.config_hash_value = config_hash(config);

  auto start = std::chrono::steady_clock::now();
  const SimulatedData data = generate_dataset(config);
  report.simulate_seconds = detail::seconds_since(start);

  const std::vector<ClassModel> models = build_class_models(data.train, 1.0);
  std::set<int> known(data.train.classes.begin(), data.train.classes.end());
  report.known_classes.assign(known.begin(), known.end());

  report.test_truth.reserve(data.test.instances.size());
  report.truth_outlier.reserve(data.test.instances.size());
  for (const Instance& inst : data.test.instances) {
    report.test_truth.push_back(inst.label.value_or(kAnomalyLabel));
    const bool outlier = !inst.label || known.count(*inst.label) == 0;
    report.truth_outlier.push_back(outlier ? 1 : 0);
    if (outlier) ++report.n_outliers;
  }
  if (report.n_outliers > 0) {
    report.rws_n = config.rws_n.value_or(report.n_outliers);
  }

  for (const std::string& algorithm : config.algorithms) {
    if (algorithm == "badac") {
      start = std::chrono::steady_clock::now();
      BadacScores scores = score_badac(models, data.train, data.test, config);
      const double elapsed = detail::seconds_since(start);
      report.badac_rows = std::move(scores.reports);

      detail::AnomalyMetricInputs inputs;
      inputs.scores.reserve(report.badac_rows.size());
      for (const PosteriorReport& row : report.badac_rows) {
        inputs.scores.push_back(row.anomaly_score);
        inputs.flagged.push_back(row.argmax == kAnomalyLabel ? 1 : 0);
        inputs.predicted.push_back(argmax_class(row));
        inputs.calibration_probs.push_back(
            class_only_prob(row, detail::calibration_class(report.known_classes)));
      }
      AlgorithmMetrics metrics = detail::evaluate_algorithm("badac", inputs, report);
      metrics.total_seconds = elapsed;
      report.algorithms.push_back(std::move(metrics));
    } else if (algorithm == "knn") {
      start = std::chrono::steady_clock::now();
      const std::size_t k = std::min(config.knn_k, data.train.instances.size());
      const NeighborModel neighbor = make_neighbor_model(data.train.instances, k);
      const double fit_elapsed = detail::seconds_since(start);

      start = std::chrono::steady_clock::now();
      report.knn_scores.resize(data.test.instances.size());
      report.knn_probs.resize(data.test.instances.size());
      detail::parallel_for(data.test.instances.size(), config.threads, [&](std::size_t i) {
        report.knn_scores[i] = knn_anomaly_score(neighbor, data.test.instances[i]);
        report.knn_probs[i] = knn_classify(neighbor, data.test.instances[i]);
      });
      const double score_elapsed = detail::seconds_since(start);

      detail::AnomalyMetricInputs inputs;
      inputs.scores = report.knn_scores;
      // kNN receives the contamination rate, like the benchmark algorithms:
      // its hard anomaly calls are the top-scoring true-count instances.
      std::vector<std::size_t> order(report.knn_scores.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (report.knn_scores[a] != report.knn_scores[b]) {
          return report.knn_scores[a] > report.knn_scores[b];
        }
        return a < b;
      });
      inputs.flagged.assign(report.knn_scores.size(), 0);
      for (std::size_t r = 0; r < std::min(report.n_outliers, order.size()); ++r) {
        inputs.flagged[order[r]] = 1;
      }
      const int target = detail::calibration_class(report.known_classes);
      for (const auto& votes : report.knn_probs) {
        int best = kAnomalyLabel;
        double best_vote = -1.0;
        for (const auto& [class_id, vote] : votes) {
          if (vote > best_vote) {
            best_vote = vote;
            best = class_id;
          }
        }
        inputs.predicted.push_back(best);
        const auto it = votes.find(target);
        inputs.calibration_probs.push_back(it == votes.end() ? 0.0 : it->second);
      }
      AlgorithmMetrics metrics = detail::evaluate_algorithm("knn", inputs, report);
      metrics.fit_seconds = fit_elapsed;
      metrics.score_seconds = score_elapsed;
      metrics.total_seconds = fit_elapsed + score_elapsed;
      report.algorithms.push_back(std::move(metrics));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Emitters: plot-ready CSV files derived from a report.

// Columns (instance_id, logP0, logP1, true_class) for the first two known
// classes: the unnormalized log-probability scatter.
inline void emit_scatter_data(const MetricsReport& report, std::ostream& out) {
  require(!report.badac_rows.empty() || report.test_truth.empty(), errc::missing_columns,
          "report has no per-instance log-probabilities");
  require(report.known_classes.size() >= 2, errc::missing_columns,
          "scatter needs two known classes");
  const int c0 = report.known_classes[0];
  const int c1 = report.known_classes[1];
  out << "instance_id,logP" << c0 << ",logP" << c1 << ",true_class\n";
  for (std::size_t i = 0; i < report.badac_rows.size(); ++i) {
    const auto& evidence = report.badac_rows[i].class_log_evidence;
    out << i << ',' << format_double(evidence.at(c0)) << ','
        << format_double(evidence.at(c1)) << ',' << report.test_truth[i] << '\n';
  }
}

inline void emit_roc_data(const MetricsReport& report, const std::string& algorithm,
                          std::ostream& out) {
  const AlgorithmMetrics* metrics = report.find(algorithm);
  require(metrics != nullptr && metrics->auc_anomaly.has_value(), errc::missing_metric,
          "no ROC computed for algorithm '" + algorithm + "'");
  out << "fpr,tpr\n";
  for (const RocPoint& p : metrics->roc) {
    out << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
  }
}

inline void emit_calibration_data(const MetricsReport& report, const std::string& algorithm,
                                  std::ostream& out) {
  const AlgorithmMetrics* metrics = report.find(algorithm);
  require(metrics != nullptr && !metrics->calibration.bins.empty(), errc::missing_metric,
          "no calibration curve for algorithm '" + algorithm + "'");
  out << "mean_predicted,empirical_fraction,count,poisson_error\n";
  for (const CalibrationBin& bin : metrics->calibration.bins) {
    out << format_double(bin.mean_predicted) << ',' << format_double(bin.empirical_fraction)
        << ',' << bin.count << ',' << format_double(bin.poisson_error) << '\n';
  }
}

// Full per-instance posterior table for the BADAC rows.
inline void emit_per_instance_table(const MetricsReport& report, std::ostream& out) {
  out << "instance_id,true_class";
  for (int c : report.known_classes) out << ",logE_" << c;
  out << ",anomaly_log_likelihood,anomaly_score";
  for (int c : report.known_classes) out << ",prob_" << c;
  out << ",anomaly_prob,predicted,prob_target_classonly\n";
  const int target = detail::calibration_class(report.known_classes);
  for (std::size_t i = 0; i < report.badac_rows.size(); ++i) {
    const PosteriorReport& row = report.badac_rows[i];
    out << i << ',' << report.test_truth[i];
    for (int c : report.known_classes) {
      out << ',' << format_double(row.class_log_evidence.at(c));
    }
    out << ',' << format_double(row.anomaly_log_likelihood.value_or(kNegInf)) << ','
        << format_double(row.anomaly_score);
    for (int c : report.known_classes) out << ',' << format_double(row.class_probs.at(c));
    out << ',' << format_double(row.anomaly_prob) << ',' << row.argmax << ','
        << format_double(class_only_prob(row, target)) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Recomputing summary metrics from an emitted per-instance table.

struct PerInstanceTable {
  std::vector<int> known_classes;
  std::vector<int> truth;
  std::vector<std::vector<double>> log_evidence;  // row-major per instance
  std::vector<double> anomaly_score;
  std::vector<int> predicted;
  std::vector<double> prob_target;
};

inline PerInstanceTable read_per_instance_table(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), errc::io_failure, "empty table");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv(line);
  PerInstanceTable table;
  std::size_t score_col = 0;
  std::size_t predicted_col = 0;
  std::size_t prob_target_col = 0;
  std::vector<std::size_t> evidence_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string_view name = header[c];
    if (name.rfind("logE_", 0) == 0) {
      table.known_classes.push_back(static_cast<int>(parse_int(name.substr(5))));
      evidence_cols.push_back(c);
    } else if (name == "anomaly_score") {
      score_col = c;
    } else if (name == "predicted") {
      predicted_col = c;
    } else if (name == "prob_target_classonly") {
      prob_target_col = c;
    }
  }
  require(!evidence_cols.empty() && score_col && predicted_col && prob_target_col,
          errc::missing_columns, "per-instance table is missing required columns");
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv(line);
    require(fields.size() == header.size(), errc::missing_columns, "short row in table");
    table.truth.push_back(static_cast<int>(parse_int(fields[1])));
    std::vector<double> evidence;
    evidence.reserve(evidence_cols.size());
    for (std::size_t c : evidence_cols) evidence.push_back(parse_double(fields[c]));
    table.log_evidence.push_back(std::move(evidence));
    table.anomaly_score.push_back(parse_double(fields[score_col]));
    table.predicted.push_back(static_cast<int>(parse_int(fields[predicted_col])));
    table.prob_target.push_back(parse_double(fields[prob_target_col]));
  }
  return table;
}

inline AlgorithmMetrics metrics_from_table(const PerInstanceTable& table,
                                           std::optional<std::size_t> rws_n = std::nullopt) {
  MetricsReport shim;
  shim.known_classes = table.known_classes;
  shim.test_truth = table.truth;
  const std::set<int> known(table.known_classes.begin(), table.known_classes.end());
  for (int t : table.truth) {
    const bool outlier = known.count(t) == 0;
    shim.truth_outlier.push_back(outlier ? 1 : 0);
    if (outlier) ++shim.n_outliers;
  }
  if (shim.n_outliers > 0) shim.rws_n = rws_n.value_or(shim.n_outliers);

  detail::AnomalyMetricInputs inputs;
  inputs.scores = table.anomaly_score;
  inputs.calibration_probs = table.prob_target;
  for (std::size_t i = 0; i < table.truth.size(); ++i) {
    inputs.flagged.push_back(table.predicted[i] == kAnomalyLabel ? 1 : 0);
    std::size_t best = 0;
    for (std::size_t c = 1; c < table.known_classes.size(); ++c) {
      if (table.log_evidence[i][c] > table.log_evidence[i][best]) best = c;
    }
    inputs.predicted.push_back(table.known_classes[best]);
  }
  return detail::evaluate_algorithm("badac", inputs, shim);
}

// ---------------------------------------------------------------------------
// JSON report assembly.

// Published full-scale benchmark results (15000 train / 15000 test, single
// core), carried along for context; never computed by this code.
inline nlohmann::json published_reference_values(ExperimentKind kind) {
  nlohmann::json ref;
  ref["source"] = "published full-scale results (15000 train / 15000 test); "
                  "not computed by this run";
  switch (kind) {
    case ExperimentKind::gaussian:
      ref["anomaly"] = {{"BADAC", {{"MCC", 0.95}, {"AUC", 0.99}, {"RWS", 0.99}}},
                        {"IsolationForest", {{"MCC", 0.00}, {"AUC", 0.89}, {"RWS", 0.02}}},
                        {"LOF", {{"MCC", 0.83}, {"AUC", 0.97}, {"RWS", 0.96}}}};
      ref["classification_accuracy"] = {{"BADAC", 99.02}, {"RandomForests", 98.66}};
      break;
    case ExperimentKind::compact:
      ref["anomaly"] = {{"BADAC", {{"MCC", 0.41}, {"AUC", 0.91}, {"RWS", 0.59}}},
                        {"IsolationForest", {{"MCC", 0.11}, {"AUC", 0.80}, {"RWS", 0.14}}},
                        {"LOF", {{"MCC", 0.44}, {"AUC", 0.90}, {"RWS", 0.63}}}};
      ref["classification_accuracy"] = {{"BADAC", 95.51}, {"RandomForests", 95.18}};
      break;
    case ExperimentKind::non_gaussian:
      ref["anomaly"] = {{"BADAC", {{"MCC", 0.84}, {"AUC", 0.99}, {"RWS", 0.96}}},
                        {"IsolationForest", {{"MCC", 0.06}, {"AUC", 0.84}, {"RWS", 0.10}}},
                        {"LOF", {{"MCC", 0.16}, {"AUC", 0.84}, {"RWS", 0.18}}}};
      ref["classification_accuracy"] = {{"BADAC", 97.71}, {"RandomForests", 98.14}};
      break;
    case ExperimentKind::correlated:
      ref["anomaly"] = {{"BADAC", {{"MCC", 0.68}, {"AUC", 0.97}, {"RWS", 0.84}}},
                        {"IsolationForest", {{"MCC", 0.01}, {"AUC", 0.70}, {"RWS", 0.03}}},
                        {"LOF", {{"MCC", 0.61}, {"AUC", 0.96}, {"RWS", 0.76}}}};
      ref["classification_accuracy"] = {{"BADAC", 68.88}, {"RandomForests", 96.72}};
      break;
  }
  return ref;
}

inline nlohmann::json report_to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["config"] = config_to_json(report.config);
  j["config_hash"] = report.config_hash_value;
  j["generator"] = CounterRng::kGeneratorName;
  j["known_classes"] = report.known_classes;
  j["n_outliers"] = report.n_outliers;
  if (report.rws_n) {
    j["rws_n"] = *report.rws_n;
  } else {
    j["rws"] = "skipped: no anomalies in the test set";
  }
  j["simulate_seconds"] = report.simulate_seconds;
  for (const AlgorithmMetrics& m : report.algorithms) {
    nlohmann::json a;
    if (m.auc_anomaly) a["auc_anomaly"] = *m.auc_anomaly;
    if (m.mcc_anomaly) a["mcc_anomaly"] = *m.mcc_anomaly;
    if (m.rws_anomaly) a["rws_anomaly"] = *m.rws_anomaly;
    a["accuracy_pooled"] = m.accuracy_pooled;
    a["accuracy_macro"] = m.accuracy_macro;
    a["runtime_seconds"] = m.total_seconds;
    if (m.algorithm == "knn") {
      a["fit_seconds"] = m.fit_seconds;
      a["score_seconds"] = m.score_seconds;
    }
    nlohmann::json bins = nlohmann::json::array();
    for (const CalibrationBin& bin : m.calibration.bins) {
      bins.push_back({{"mean_predicted", bin.mean_predicted},
                      {"empirical_fraction", bin.empirical_fraction},
                      {"count", bin.count},
                      {"poisson_error", bin.poisson_error}});
    }
    a["calibration"] = std::move(bins);
    nlohmann::json roc = nlohmann::json::array();
    for (const RocPoint& p : m.roc) roc.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}});
    a["roc"] = std::move(roc);
    j["algorithms"][m.algorithm] = std::move(a);
  }
  j["reference_results"] = published_reference_values(report.config.kind);
  return j;
}

// ---------------------------------------------------------------------------
// Timing.

struct PhaseTiming {
  std::string algorithm;
  std::string phase;
  double seconds = 0.0;
};

struct TimingReport {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t grid_points = 0;
  std::size_t threads = 1;
  std::uint64_t pair_count = 0;  // n_train * n_test, for scaling analysis
  std::string hardware;
  std::vector<PhaseTiming> phases;

  double total_for(const std::string& algorithm) const {
    for (const PhaseTiming& p : phases) {
      if (p.algorithm == algorithm && p.phase == "total") return p.seconds;
    }
    fail(errc::missing_metric, "no timing recorded for '" + algorithm + "'");
  }
};

inline std::string hardware_note() {
  std::string cpu = "unknown-cpu";
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpuinfo, line)) {
    const auto pos = line.find("model name");
    if (pos != std::string::npos) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        cpu = line.substr(colon + 1);
        if (!cpu.empty() && cpu.front() == ' ') cpu.erase(0, 1);
      }
      break;
    }
  }
  return cpu + " (" + std::to_string(std::thread::hardware_concurrency()) + " cores)";
}

inline TimingReport timing_report(const ExperimentConfig& config) {
  const MetricsReport report = run_experiment(config);
  TimingReport timing;
  timing.n_train = config.n_train;
  timing.n_test = config.n_test;
  timing.grid_points = config.grid_points;
  timing.threads = config.threads;
  timing.pair_count = static_cast<std::uint64_t>(config.n_train) * config.n_test;
  timing.hardware = hardware_note();
  timing.phases.push_back({"simulate", "total", report.simulate_seconds});
  for (const AlgorithmMetrics& m : report.algorithms) {
    if (m.algorithm == "badac") {
      // No distinct training and testing phases; one combined figure.
      timing.phases.push_back({"badac", "total", m.total_seconds});
    } else {
      timing.phases.push_back({m.algorithm, "fit", m.fit_seconds});
      timing.phases.push_back({m.algorithm, "score", m.score_seconds});
      timing.phases.push_back({m.algorithm, "total", m.total_seconds});
    }
  }
  return timing;
}

inline nlohmann::json timing_to_json(const TimingReport& timing) {
  nlohmann::json j;
  j["n_train"] = timing.n_train;
  j["n_test"] = timing.n_test;
  j["grid_points"] = timing.grid_points;
  j["threads"] = timing.threads;
  j["pair_count"] = timing.pair_count;
  j["hardware"] = timing.hardware;
  nlohmann::json phases = nlohmann::json::array();
  for (const PhaseTiming& p : timing.phases) {
    phases.push_back({{"algorithm", p.algorithm}, {"phase", p.phase}, {"seconds", p.seconds}});
  }
  j["phases"] = std::move(phases);
  j["reference_total_seconds"] = {
      {"source", "published full-scale timings (15000/15000, single core, 2.9 GHz)"},
      {"RandomForests", 99.24},
      {"IsolationForest", 2.83},
      {"LOF", 40.46},
      {"BADAC", 1281.82}};
  return j;
}

}  // namespace badac
