#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "badac/config.hpp"
#include "badac/core.hpp"
#include "badac/covariance.hpp"
#include "badac/errors.hpp"
#include "badac/rng.hpp"

namespace badac {

enum class CurveFamily {
  sine,           // sin(w x)
  quadratic,      // a x^2 + b x + c
  step,           // h for x <= x0, else 0
  gaussian_bump,  // A exp(-((x - mu)/w)^2)
  sine_mixture,   // 0.2 * sum of five sines
  sine_plus_bump  // sin(w x) + A exp(-((x - mu)/w)^2), narrow bump
};

struct ParamDist {
  enum class Kind { normal, uniform };
  Kind kind = Kind::normal;
  double a = 0.0;  // mean (normal) or lower bound (uniform)
  double b = 1.0;  // std deviation (normal) or upper bound (uniform)

  double sample(CounterRng& rng) const {
    if (kind == Kind::normal) return a + b * rng.next_gaussian();
    return a + (b - a) * rng.next_unit();
  }
};

// One generating recipe: functional family plus its parameter distributions,
// in the fixed draw order documented at generate_curve.
struct ClassSpec {
  int class_id = 0;
  bool outlier = false;
  CurveFamily family = CurveFamily::sine;
  std::vector<ParamDist> params;
};

// The five standard generating classes: two inlier families (sine and
// quadratic) and three outlier families (step, broad bump, five-sine sum).
inline std::vector<ClassSpec> table1_specs() {
  using K = ParamDist::Kind;
  return {
      {0, false, CurveFamily::sine, {{K::normal, 5.0, 2.0}}},
      {1, false, CurveFamily::quadratic,
       {{K::normal, 0.5, 0.2}, {K::normal, 0.5, 0.2}, {K::normal, 0.0, 0.2}}},
      {2, true, CurveFamily::step, {{K::normal, 1.0, 0.3}, {K::normal, 0.5, 0.2}}},
      {3, true, CurveFamily::gaussian_bump,
       {{K::normal, 0.5, 0.2}, {K::normal, 0.1, 0.05}, {K::normal, 1.0, 0.5}}},
      {4, true, CurveFamily::sine_mixture, {{K::normal, 30.0, 20.0}}},
  };
}

// Compact anomalies: a narrow Gaussian bump (positive or negative amplitude)
// superposed on a standard sine curve. Inliers stay the two standard classes.
inline std::vector<ClassSpec> table2_specs() {
  using K = ParamDist::Kind;
  return {
      {2, true, CurveFamily::sine_plus_bump,
       {{K::normal, 5.0, 2.0}, {K::normal, 1.5, 0.5}, {K::uniform, 0.0, 1.0},
        {K::normal, 0.03, 0.01}}},
      {3, true, CurveFamily::sine_plus_bump,
       {{K::normal, 5.0, 2.0}, {K::normal, -1.5, 0.5}, {K::uniform, 0.0, 1.0},
        {K::normal, 0.03, 0.01}}},
  };
}

// Evaluates one freshly parameterized noiseless curve on the grid.
//
// Parameter draw order (the reproducibility contract):
//   sine:            w
//   quadratic:       a, b, c
//   step:            h, x0
//   gaussian_bump:   A, mu, w
//   sine_mixture:    w1..w5 (five draws from the single listed distribution)
//   sine_plus_bump:  w, A, mu, width  (width redrawn while <= 0)
//
// Sigmas are a placeholder (1.0) until a noise op assigns the reported errors.
inline Instance generate_curve(const ClassSpec& spec, const std::vector<double>& grid,
                               CounterRng& rng) {
  Instance inst;
  inst.grid = grid;
  inst.label = spec.class_id;
  inst.values.reserve(grid.size());
  inst.sigmas.assign(grid.size(), 1.0);

  switch (spec.family) {
    case CurveFamily::sine: {
      const double w = spec.params[0].sample(rng);
      for (double x : grid) inst.values.push_back(std::sin(w * x));
      break;
    }
    case CurveFamily::quadratic: {
      const double a = spec.params[0].sample(rng);
      const double b = spec.params[1].sample(rng);
      const double c = spec.params[2].sample(rng);
      for (double x : grid) inst.values.push_back(a * x * x + b * x + c);
      break;
    }
    case CurveFamily::step: {
      const double h = spec.params[0].sample(rng);
      const double x0 = spec.params[1].sample(rng);
      for (double x : grid) inst.values.push_back(x <= x0 ? h : 0.0);
      break;
    }
    case CurveFamily::gaussian_bump: {
      const double amp = spec.params[0].sample(rng);
      const double mu = spec.params[1].sample(rng);
      const double w = spec.params[2].sample(rng);
      for (double x : grid) {
        const double z = (x - mu) / w;
        inst.values.push_back(amp * std::exp(-z * z));
      }
      break;
    }
    case CurveFamily::sine_mixture: {
      double w[5];
      for (double& wi : w) wi = spec.params[0].sample(rng);
      for (double x : grid) {
        double y = 0.0;
        for (double wi : w) y += std::sin(wi * x);
        inst.values.push_back(0.2 * y);
      }
      break;
    }
    case CurveFamily::sine_plus_bump: {
      const double w = spec.params[0].sample(rng);
      const double amp = spec.params[1].sample(rng);
      const double mu = spec.params[2].sample(rng);
      double width = spec.params[3].sample(rng);
      while (width <= 0.0) width = spec.params[3].sample(rng);
      for (double x : grid) {
        const double z = (x - mu) / width;
        inst.values.push_back(std::sin(w * x) + amp * std::exp(-z * z));
      }
      break;
    }
  }
  return inst;
}

// Adds i.i.d. N(0, sigma^2) noise; the reported error equals the true one.
inline Instance add_gaussian_noise(Instance inst, double sigma, CounterRng& rng) {
  require(sigma > 0.0, errc::non_positive_sigma, "noise sigma must be positive");
  for (double& v : inst.values) v += sigma * rng.next_gaussian();
  inst.sigmas.assign(inst.values.size(), sigma);
  return inst;
}

// Two-component noise: with probability (1 - fraction) the point scatters at
// sigma, otherwise at inflation * sigma. The reported error stays sigma, so
// the wide component is deliberately misreported. Per point: one uniform
// (component pick), then one gaussian.
inline Instance add_mixture_noise(Instance inst, double sigma, double fraction,
                                  double inflation, CounterRng& rng) {
  require(sigma > 0.0, errc::non_positive_sigma, "noise sigma must be positive");
  require(fraction >= 0.0 && fraction < 1.0, errc::invalid_fraction,
          "mixture fraction must lie in [0, 1)");
  require(inflation > 1.0, errc::config_invalid, "mixture inflation must exceed 1");
  for (double& v : inst.values) {
    const double width = rng.next_unit() <= fraction ? inflation * sigma : sigma;
    v += width * rng.next_gaussian();
  }
  inst.sigmas.assign(inst.values.size(), sigma);
  return inst;
}

// Nested-step covariance: C_ij = sigma^2 on the diagonal plus
// V_ij = step * (floor(min(i,j) / (m/levels)) + 1), so later points are
// progressively more correlated.
inline CovarianceModel wedding_cake_covariance(std::size_t m, double sigma, double step,
                                               std::size_t levels = 5) {
  require(m >= levels, errc::m_too_small, "need at least one point per level");
  require(sigma > 0.0, errc::non_positive_sigma, "sigma must be positive");
  const double bin = static_cast<double>(m) / static_cast<double>(levels);
  std::vector<double> entries(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto level = std::floor(static_cast<double>(std::min(i, j)) / bin) + 1.0;
      entries[i * m + j] = step * level + (i == j ? sigma * sigma : 0.0);
    }
  }
  return make_covariance(m, std::move(entries));
}

// Draws noise as L z for a symmetric factor L of cov. Reported sigmas are the
// diagonal square roots: the marginal scatter is honest, the correlation is
// hidden from any model reading the instance.
inline Instance add_correlated_noise(Instance inst, const CovarianceModel& cov,
                                     CounterRng& rng) {
  require(cov.dim == inst.size(), errc::dimension_mismatch,
          "covariance dimension does not match instance length");
  const Eigen::MatrixXd lower = detail::cholesky_with_jitter(cov).matrixL();
  Eigen::VectorXd z(static_cast<Eigen::Index>(cov.dim));
  for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.next_gaussian();
  const Eigen::VectorXd noise = lower * z;
  for (std::size_t j = 0; j < inst.size(); ++j) {
    inst.values[j] += noise(static_cast<Eigen::Index>(j));
    inst.sigmas[j] = std::sqrt(cov(j, j));
  }
  return inst;
}

// Per-class noise assignment for one experiment.
struct NoiseSpec {
  enum class Regime { gaussian, mixture, correlated };
  Regime regime = Regime::gaussian;
  std::map<int, double> class_sigmas;
  double mixture_fraction = 0.2;
  double mixture_inflation = 5.0;
  std::optional<CovarianceModel> correlation;  // applied to class 0 only
};

// Standard noise levels: sigma 0.3 everywhere except the quadratic class at
// 0.5. The correlated regime correlates class 0 only.
inline NoiseSpec standard_noise(ExperimentKind kind, std::size_t grid_points) {
  NoiseSpec spec;
  spec.class_sigmas = {{0, 0.3}, {1, 0.5}, {2, 0.3}, {3, 0.3}, {4, 0.3}};
  switch (kind) {
    case ExperimentKind::gaussian:
    case ExperimentKind::compact:
      spec.regime = NoiseSpec::Regime::gaussian;
      break;
    case ExperimentKind::non_gaussian:
      spec.regime = NoiseSpec::Regime::mixture;
      break;
    case ExperimentKind::correlated:
      spec.regime = NoiseSpec::Regime::correlated;
      spec.correlation = wedding_cake_covariance(grid_points, 0.3, 0.1, 5);
      break;
  }
  return spec;
}

inline Instance apply_noise(Instance inst, const NoiseSpec& noise, CounterRng& rng) {
  const double sigma = noise.class_sigmas.at(*inst.label);
  switch (noise.regime) {
    case NoiseSpec::Regime::gaussian:
      return add_gaussian_noise(std::move(inst), sigma, rng);
    case NoiseSpec::Regime::mixture:
      return add_mixture_noise(std::move(inst), sigma, noise.mixture_fraction,
                               noise.mixture_inflation, rng);
    case NoiseSpec::Regime::correlated:
      if (*inst.label == 0) {
        return add_correlated_noise(std::move(inst), *noise.correlation, rng);
      }
      return add_gaussian_noise(std::move(inst), sigma, rng);
  }
  return inst;
}

inline std::vector<double> uniform_grid(std::size_t points, double lo = 0.0, double hi = 1.0) {
  require(points >= 2, errc::config_invalid, "grid needs at least two points");
  std::vector<double> grid(points);
  for (std::size_t j = 0; j < points; ++j) {
    grid[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(points - 1);
  }
  return grid;
}

struct SimulatedData {
  Dataset train;
  Dataset test;
};

namespace detail {

// Substream keys, fixed forever: 1 = training instances, 2 = test instances.
inline constexpr std::uint64_t kTrainStream = 1;
inline constexpr std::uint64_t kTestStream = 2;

}  // namespace detail

// Builds the train/test pair for one experiment. Training data contain only
// the two inlier classes in an exact half split (remainder to class 0); the
// test set appends the configured outlier fraction, split evenly over the
// outlier classes with the remainder handed out round-robin. Every instance
// draws from its own substream, so the result is bit-reproducible from
// (config, seed) alone.
inline SimulatedData generate_dataset(const ExperimentConfig& config) {
  validate_config(config);
  const std::vector<double> grid = uniform_grid(config.grid_points);
  const NoiseSpec noise = standard_noise(config.kind, config.grid_points);

  const std::vector<ClassSpec> table1 = table1_specs();
  std::vector<ClassSpec> outlier_specs;
  if (config.kind == ExperimentKind::compact) {
    outlier_specs = table2_specs();
  } else {
    outlier_specs = {table1[2], table1[3], table1[4]};
  }

  CounterRng root(config.seed);

  auto make_instance = [&](std::uint64_t phase, std::uint64_t index, const ClassSpec& spec) {
    CounterRng stream = root.substream(phase).substream(index);
    return apply_noise(generate_curve(spec, grid, stream), noise, stream);
  };

  std::vector<Instance> train;
  train.reserve(config.n_train);
  const std::size_t n_train0 = (config.n_train + 1) / 2;
  for (std::size_t i = 0; i < config.n_train; ++i) {
    const ClassSpec& spec = i < n_train0 ? table1[0] : table1[1];
    train.push_back(make_instance(detail::kTrainStream, i, spec));
  }

  const auto n_outliers = static_cast<std::size_t>(
      std::llround(config.outlier_fraction * static_cast<double>(config.n_test)));
  const std::size_t n_inliers = config.n_test - n_outliers;
  const std::size_t n_test0 = (n_inliers + 1) / 2;

  std::vector<Instance> test;
  test.reserve(config.n_test);
  for (std::size_t i = 0; i < config.n_test; ++i) {
    const ClassSpec* spec = nullptr;
    if (i < n_test0) {
      spec = &table1[0];
    } else if (i < n_inliers) {
      spec = &table1[1];
    } else {
      const std::size_t rank = i - n_inliers;
      const std::size_t k = outlier_specs.size();
      const std::size_t base = n_outliers / k;
      const std::size_t rem = n_outliers % k;
      // contiguous blocks of size base+1 for the first rem classes, base after
      std::size_t cls = 0;
      std::size_t consumed = 0;
      for (; cls < k; ++cls) {
        const std::size_t block = base + (cls < rem ? 1 : 0);
        if (rank < consumed + block) break;
        consumed += block;
      }
      spec = &outlier_specs[cls];
    }
    test.push_back(make_instance(detail::kTestStream, i, *spec));
  }

  return SimulatedData{make_dataset(std::move(train)), make_dataset(std::move(test))};
}

}  // namespace badac
