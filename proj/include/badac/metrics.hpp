#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "badac/errors.hpp"

namespace badac {

// Scores paired with binary ground truth (1 = positive / anomalous).
struct RankedPredictions {
  std::vector<double> scores;
  std::vector<int> truth;
};

inline const RankedPredictions& validate_ranked(const RankedPredictions& ranked) {
  require(ranked.scores.size() == ranked.truth.size(), errc::length_mismatch,
          "scores and truth lengths differ");
  for (int t : ranked.truth) {
    require(t == 0 || t == 1, errc::config_invalid, "truth indicators must be 0 or 1");
  }
  return ranked;
}

// Truth indicators reordered by descending score, ties by ascending index.
inline std::vector<int> ranked_indicators(const RankedPredictions& ranked) {
  validate_ranked(ranked);
  std::vector<std::size_t> order(ranked.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ranked.scores[a] != ranked.scores[b]) return ranked.scores[a] > ranked.scores[b];
    return a < b;
  });
  std::vector<int> indicators;
  indicators.reserve(order.size());
  for (std::size_t i : order) indicators.push_back(ranked.truth[i]);
  return indicators;
}

// Rank-weighted score over the top n_expected ranks: weight N+1-i at rank i,
// normalized by N(N+1)/2. 1 means the top of the ranking is all true
// anomalies, 0 means none of them is.
inline double rws(std::span<const int> ranked_truth, std::size_t n_expected) {
  require(n_expected >= 1, errc::n_exceeds_list, "expected anomaly count must be >= 1");
  require(ranked_truth.size() >= n_expected, errc::n_exceeds_list,
          "ranking shorter than the expected anomaly count");
  const double n = static_cast<double>(n_expected);
  double sum = 0.0;
  for (std::size_t i = 1; i <= n_expected; ++i) {
    if (ranked_truth[i - 1] == 1) sum += n + 1.0 - static_cast<double>(i);
  }
  return sum / (0.5 * n * (n + 1.0));
}

// Matthews correlation coefficient; 0 whenever a denominator factor vanishes.
inline double mcc(double tp, double tn, double fp, double fn) {
  require(tp >= 0 && tn >= 0 && fp >= 0 && fn >= 0, errc::config_invalid,
          "confusion counts must be nonnegative");
  const double d1 = tp + fp;
  const double d2 = tp + fn;
  const double d3 = tn + fp;
  const double d4 = tn + fn;
  if (d1 == 0 || d2 == 0 || d3 == 0 || d4 == 0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(d1 * d2 * d3 * d4);
}

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Threshold sweep over descending unique scores; tied scores enter at one
// threshold. Points run from (0,0) to (1,1).
inline std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                       std::span<const int> truth) {
  require(scores.size() == truth.size(), errc::length_mismatch,
          "scores and truth lengths differ");
  double positives = 0.0;
  double negatives = 0.0;
  for (int t : truth) {
    require(t == 0 || t == 1, errc::config_invalid, "truth indicators must be 0 or 1");
    (t == 1 ? positives : negatives) += 1.0;
  }
  require(positives > 0.0 && negatives > 0.0, errc::single_class_truth,
          "ROC needs both classes in the truth");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> curve{{0.0, 0.0}};
  double tp = 0.0;
  double fp = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      (truth[order[i]] == 1 ? tp : fp) += 1.0;
      ++i;
    }
    curve.push_back({fp / negatives, tp / positives});
  }
  return curve;
}

// Trapezoidal area under a ROC curve.
inline double auc(std::span<const RocPoint> curve) {
  require(curve.size() >= 2, errc::missing_metric, "ROC curve has too few points");
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) * 0.5 * (curve[i].tpr + curve[i - 1].tpr);
  }
  return area;
}

inline double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  require(predicted.size() == truth.size(), errc::length_mismatch,
          "prediction and truth lengths differ");
  require(!predicted.empty(), errc::empty_input, "no predictions to score");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == truth[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predicted.size());
}

struct CalibrationBin {
  double mean_predicted = 0.0;    // mean predicted probability in the bin
  double empirical_fraction = 0.0;  // observed positive fraction
  std::size_t count = 0;
  double poisson_error = 0.0;     // sqrt(count)/count
};

struct CalibrationCurve {
  std::vector<CalibrationBin> bins;
};

// Equal-width probability bins on [0,1]; empty bins are omitted. The bin
// x-coordinate is the mean predicted probability, not the bin center.
inline CalibrationCurve calibration_curve(std::span<const double> probs,
                                          std::span<const int> truth,
                                          std::size_t bin_count = 10) {
  require(probs.size() == truth.size(), errc::length_mismatch,
          "probabilities and truth lengths differ");
  require(bin_count >= 1, errc::config_invalid, "need at least one bin");
  std::vector<double> sum_p(bin_count, 0.0);
  std::vector<std::size_t> members(bin_count, 0);
  std::vector<std::size_t> positives(bin_count, 0);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    require(probs[i] >= 0.0 && probs[i] <= 1.0, errc::config_invalid,
            "probabilities must lie in [0, 1]");
    require(truth[i] == 0 || truth[i] == 1, errc::config_invalid,
            "truth indicators must be 0 or 1");
    auto bin = static_cast<std::size_t>(probs[i] * static_cast<double>(bin_count));
    bin = std::min(bin, bin_count - 1);
    sum_p[bin] += probs[i];
    ++members[bin];
    positives[bin] += static_cast<std::size_t>(truth[i]);
  }
  CalibrationCurve curve;
  for (std::size_t b = 0; b < bin_count; ++b) {
    if (members[b] == 0) continue;
    const double n = static_cast<double>(members[b]);
    curve.bins.push_back({sum_p[b] / n, static_cast<double>(positives[b]) / n,
                          members[b], std::sqrt(n) / n});
  }
  return curve;
}

}  // namespace badac
