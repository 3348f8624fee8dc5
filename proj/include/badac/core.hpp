#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "badac/errors.hpp"

namespace badac {

// One object's feature vector: observations on a shared x-grid with known
// per-point 1-sigma uncertainties. Treated as immutable once validated.
struct Instance {
  std::vector<double> grid;    // strictly increasing x positions
  std::vector<double> values;  // observed values
  std::vector<double> sigmas;  // per-point 1-sigma uncertainties, all > 0
  std::optional<int> label;    // true class id, when known

  std::size_t size() const { return grid.size(); }
};

inline bool same_grid(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// Checks the structural invariants and returns the instance unchanged.
inline const Instance& validate_instance(const Instance& inst) {
  require(inst.grid.size() >= 1, errc::length_mismatch, "instance must have at least one point");
  require(inst.values.size() == inst.grid.size() && inst.sigmas.size() == inst.grid.size(),
          errc::length_mismatch, "grid/values/sigmas lengths differ");
  for (double s : inst.sigmas) {
    require(s > 0.0 && std::isfinite(s), errc::non_positive_sigma,
            "every sigma must be strictly positive and finite");
  }
  for (std::size_t j = 1; j < inst.grid.size(); ++j) {
    require(inst.grid[j] > inst.grid[j - 1], errc::non_monotone_grid,
            "grid must be strictly increasing");
  }
  return inst;
}

inline Instance validate_instance(Instance&& inst) {
  validate_instance(static_cast<const Instance&>(inst));
  return std::move(inst);
}

// A labeled collection of training instances for one class, all on one grid,
// plus the class prior probability. Duplicate members are allowed.
struct ClassModel {
  int class_id = 0;
  std::vector<Instance> instances;
  double prior = 1.0;

  std::size_t size() const { return instances.size(); }
  const std::vector<double>& grid() const { return instances.front().grid; }
};

inline ClassModel make_class_model(int class_id, std::vector<Instance> instances,
                                   double prior) {
  require(!instances.empty(), errc::empty_class, "class model needs at least one instance");
  require(prior > 0.0 && prior <= 1.0, errc::prior_sum_violation,
          "class prior must lie in (0, 1]");
  for (const Instance& inst : instances) {
    validate_instance(inst);
    require(same_grid(inst.grid, instances.front().grid), errc::grid_mismatch,
            "all class members must share one grid");
  }
  return ClassModel{class_id, std::move(instances), prior};
}

// Appends one instance; the prior is left untouched.
inline ClassModel merge_into_class(ClassModel model, Instance inst) {
  validate_instance(inst);
  require(same_grid(inst.grid, model.grid()), errc::grid_mismatch,
          "instance grid does not match class grid");
  model.instances.push_back(std::move(inst));
  return model;
}

// Per-point inverse-variance summary of a class: mean estimate and combined
// standard deviation on the class grid.
struct TemplateModel {
  int class_id = 0;
  std::vector<double> grid;
  std::vector<double> mean;
  std::vector<double> sigma;
  double prior = 1.0;

  std::size_t size() const { return grid.size(); }
};

inline const TemplateModel& validate_template(const TemplateModel& tmpl) {
  require(tmpl.mean.size() == tmpl.grid.size() && tmpl.sigma.size() == tmpl.grid.size(),
          errc::length_mismatch, "template grid/mean/sigma lengths differ");
  for (double s : tmpl.sigma) {
    require(s > 0.0 && std::isfinite(s), errc::non_positive_sigma,
            "template sigma entries must be strictly positive");
  }
  return tmpl;
}

// A bag of instances plus the distinct labels present among them.
struct Dataset {
  std::vector<Instance> instances;
  std::vector<int> classes;

  std::size_t size() const { return instances.size(); }
};

inline Dataset make_dataset(std::vector<Instance> instances) {
  std::set<int> labels;
  for (const Instance& inst : instances) {
    validate_instance(inst);
    if (inst.label) labels.insert(*inst.label);
  }
  return Dataset{std::move(instances), std::vector<int>(labels.begin(), labels.end())};
}

}  // namespace badac
