#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "badac/errors.hpp"

namespace badac {

// Symmetric positive-semidefinite covariance over the feature index,
// stored dense row-major.
struct CovarianceModel {
  std::size_t dim = 0;
  std::vector<double> entries;  // dim * dim, row-major

  double operator()(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }
  double& at(std::size_t i, std::size_t j) { return entries[i * dim + j]; }

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
  matrix() const {
    return {entries.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)};
  }
};

namespace detail {

// Cholesky factor of cov, retried once with diagonal jitter. The jitter
// bound doubles as the PSD acceptance test.
inline Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(const CovarianceModel& cov,
                                                        double max_jitter = 1e-10) {
  Eigen::MatrixXd m = cov.matrix();
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt;
  m.diagonal().array() += max_jitter;
  llt.compute(m);
  require(llt.info() == Eigen::Success, errc::non_psd_covariance,
          "matrix is not positive semidefinite within jitter tolerance");
  return llt;
}

}  // namespace detail

// Validates symmetry (relative tolerance 1e-12) and positive
// semidefiniteness (factorization after at most 1e-10 diagonal jitter).
inline CovarianceModel make_covariance(std::size_t dim, std::vector<double> entries) {
  require(dim >= 1, errc::dimension_mismatch, "covariance dimension must be >= 1");
  require(entries.size() == dim * dim, errc::dimension_mismatch,
          "covariance entry count does not match dimension");
  CovarianceModel cov{dim, std::move(entries)};
  double max_diag = 0.0;
  for (std::size_t i = 0; i < dim; ++i) max_diag = std::max(max_diag, std::abs(cov(i, i)));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double tol = 1e-12 * std::max({std::abs(cov(i, j)), std::abs(cov(j, i)), max_diag});
      require(std::abs(cov(i, j) - cov(j, i)) <= tol, errc::non_psd_covariance,
              "matrix is not symmetric");
    }
  }
  detail::cholesky_with_jitter(cov);
  return cov;
}

}  // namespace badac
