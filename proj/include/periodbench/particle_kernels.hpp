#pragma once

// Data-parallel inner loops of the particle filter. Each kernel has an
// OpenMP path and a plain serial path; both perform identical per-particle
// arithmetic and the serial path is the reference the tests compare against.

#include <Eigen/Core>

#include "periodbench/models.hpp"
#include "periodbench/parallel.hpp"

namespace periodbench::kernels {

/// particles.col(i) <- f(particles.col(i), k) + S * normals.col(i), S = sqrt(Q).
void propagate(const DiscreteSystem& system, int step_index, const Eigen::MatrixXd& normals,
               Eigen::MatrixXd& particles, Execution exec);

/// out(i) = log N(y; h(particles.col(i)), R) up to an additive constant.
void log_likelihood(const DiscreteSystem& system, const Eigen::MatrixXd& particles, const Eigen::VectorXd& y,
                    Eigen::VectorXd& out, Execution exec);

/// out.col(j) = in.col(indices[j]).
void gather(const Eigen::MatrixXd& in, const std::vector<std::size_t>& indices, Eigen::MatrixXd& out,
            Execution exec);

}  // namespace periodbench::kernels
