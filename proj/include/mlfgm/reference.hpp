#pragma once

#include <Eigen/Dense>
#include <functional>

#include "mlfgm/factorization.hpp"

namespace mlfgm {

// Verification oracle: builds the dense supra affinity entry by entry from
// the affinity blocks and edge lists, with no incidence-matrix algebra.
// Entry order matches assemble_dense_supra: flat index of (vertex-pair
// (i, a), layer alpha) is alpha * n1 * n2 + a * n1 + i.
Eigen::MatrixXd direct_placement_supra(const FactorizedProblem& fp);

// Central-difference gradient of a scalar function over matrices.
Eigen::MatrixXd finite_difference_gradient(
    const std::function<double(const Eigen::MatrixXd&)>& f,
    const Eigen::MatrixXd& X, double h = 1e-5);

}  // namespace mlfgm
