#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <vector>

#include "badac/core.hpp"
#include "badac/errors.hpp"

namespace badac {

// Plain k-nearest-neighbours over raw value vectors: the uncertainty-blind
// comparison point for both classification and anomaly scoring.
struct NeighborModel {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  std::vector<double> grid;
  std::size_t k = 1;
};

inline NeighborModel make_neighbor_model(const std::vector<Instance>& train, std::size_t k) {
  require(!train.empty(), errc::empty_input, "no training instances");
  require(k >= 1 && k <= train.size(), errc::config_invalid,
          "k must lie in [1, training size]");
  NeighborModel model;
  model.k = k;
  model.grid = train.front().grid;
  model.features.reserve(train.size());
  model.labels.reserve(train.size());
  for (const Instance& inst : train) {
    validate_instance(inst);
    require(same_grid(inst.grid, model.grid), errc::grid_mismatch,
            "training instances must share one grid");
    require(inst.label.has_value(), errc::config_invalid, "training instances need labels");
    model.features.push_back(inst.values);
    model.labels.push_back(*inst.label);
  }
  return model;
}

namespace detail {

// Indices of the k nearest training vectors, ties by ascending index.
inline std::vector<std::size_t> nearest_indices(const NeighborModel& model,
                                                const Instance& test) {
  require(same_grid(test.grid, model.grid), errc::grid_mismatch,
          "test grid does not match model grid");
  std::vector<double> dist(model.features.size());
  for (std::size_t i = 0; i < model.features.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < test.values.size(); ++j) {
      const double diff = test.values[j] - model.features[i][j];
      d2 += diff * diff;
    }
    dist[i] = d2;
  }
  std::vector<std::size_t> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(model.k),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (dist[a] != dist[b]) return dist[a] < dist[b];
                      return a < b;
                    });
  order.resize(model.k);
  return order;
}

}  // namespace detail

// Neighbour-vote class probabilities (multiples of 1/k, summing to 1).
inline std::map<int, double> knn_classify(const NeighborModel& model, const Instance& test) {
  std::map<int, double> votes;
  for (std::size_t i : detail::nearest_indices(model, test)) {
    votes[model.labels[i]] += 1.0 / static_cast<double>(model.k);
  }
  return votes;
}

// Mean Euclidean distance to the k nearest training vectors; larger is more
// anomalous.
inline double knn_anomaly_score(const NeighborModel& model, const Instance& test) {
  double total = 0.0;
  for (std::size_t i : detail::nearest_indices(model, test)) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < test.values.size(); ++j) {
      const double diff = test.values[j] - model.features[i][j];
      d2 += diff * diff;
    }
    total += std::sqrt(d2);
  }
  return total / static_cast<double>(model.k);
}

}  // namespace badac
