#pragma once

// Effective conductance tensor of a network medium via the periodic cell
// problem on the quotient graph, and its windowed (Dirichlet) approximations
// on growing boxes of the periodic extension.

#include <chrono>
#include <vector>

#include "reticulate/core.hpp"

namespace reticulate {

inline constexpr double kTolSolve = 1e-11;
/// Eigenvalues of Q at most this fraction of Σ aℓ are reported as exact zeros.
inline constexpr double kRoundoffFloor = 1e-15;

struct EffectiveTensor {
    SymMatrix Q;
    /// Largest relative normal-equation residual over the n solves.
    double residual = 0.0;
    int component_count = 0;
};

struct SolverOptions {
    double tol = kTolSolve;
    /// Iteration budget is budget_factor * (number of unknowns).
    int budget_factor = 20;
    /// Worker threads for the n independent right-hand sides (0: default).
    int threads = 0;
};

/// p·Q p = min over node potentials φ of Σ_e (a_e/ℓ_e)(φ_v - φ_u + p·d_e)^2.
/// Isotropic and tangential media share the same Q. Eigenvalues within
/// kRoundoffFloor * Σ aℓ of zero are set to zero.
EffectiveTensor effective_tensor(const NetworkMedium& medium, const SolverOptions& options = {});

/// p·Q q evaluated from the two minimizers.
double effective_bilinear(const NetworkMedium& medium, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                          const SolverOptions& options = {});

/// Splits edge e into parts[e] collinear pieces (parts empty: all 1). Weights are
/// kept; total length and mass tensor are unchanged.
PeriodicNetwork subdivide(const PeriodicNetwork& net, const std::vector<int>& parts);

struct HomogenizationWindow {
    int R = 0;
    SymMatrix Q_R;
    int node_count = 0;
    std::chrono::duration<double> solve_time{};
};

struct HomogenizationTrace {
    std::vector<HomogenizationWindow> windows;
};

struct WindowOptions {
    SolverOptions solver;
    /// Maximum number of tiled nodes per window.
    long long node_budget = 4'000'000;
};

/// For each R, restricts the periodic extension to the box [-R,R)^n, truncating
/// edges at its faces. Pins u = p·x at nodes on the boundary and at both ends of
/// every truncated edge, minimizes the edge energy over the remaining
/// potentials and divides by (2R)^n.
HomogenizationTrace homogenize_window(const NetworkMedium& medium, std::vector<int> R_list,
                                      const WindowOptions& options = {});

}  // namespace reticulate
