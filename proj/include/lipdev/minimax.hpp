#pragma once

#include <Eigen/Core>

namespace lipdev {

/// min over c of max_i |f_i - (B c)_i| (discrete Chebyshev approximation).
///
/// Solved as the dual linear program: maximise f.w subject to B^T w = 0 and
/// ||w||_1 = 1, which is the exchange method written in simplex form.
double discrete_minimax(const Eigen::MatrixXd& B, const Eigen::VectorXd& f);

/// Dense two-phase simplex with Bland-style tie breaking:
/// maximise c.z subject to A z = b, z >= 0, b >= 0. Returns the optimal value
/// and writes the solution into `z`. Throws NumericError when infeasible,
/// unbounded, or out of iterations.
double simplex_max(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                   const Eigen::VectorXd& c, Eigen::VectorXd* z = nullptr);

}  // namespace lipdev
