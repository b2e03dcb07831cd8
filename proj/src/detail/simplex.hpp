#pragma once

// Dense two-phase simplex with Bland's rule for small feasibility problems:
// minimize c·x subject to A x = b, x >= 0.

#include <Eigen/Dense>

namespace reticulate::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
};

LpResult solve_standard_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                           double eps = 1e-11);

}  // namespace reticulate::detail
