#pragma once

// Upper-bound attainability on network media: node balance, maximality,
// stationary weight generation, valency, irreducibility, ball-mass profiles,
// the monotonicity check and local-dimension estimates.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reticulate/cellsolver.hpp"
#include "reticulate/core.hpp"

namespace reticulate {

inline constexpr double kTolBalance = 1e-10;
inline constexpr double kStationaryMargin = 1e-6;

struct NodeResidual {
    int node = 0;
    Eigen::VectorXd residual;
    double norm = 0.0;
};

/// Weighted sums of outgoing unit tangents at every node.
struct BalanceReport {
    std::vector<NodeResidual> per_node;
    double max_residual = 0.0;
    bool balanced = true;
    /// Non-empty for isotropic media: the residual is always the tangential one.
    std::string note;
};

BalanceReport balance_report(const NetworkMedium& medium);

/// Singular Wiener tolerance 1e-8 * (1 + |mass|_F).
double tol_wiener(const SymMatrix& mass);

struct MaximalityResult {
    bool is_maximal = false;
    SymMatrix gap;
    double gap_norm = 0.0;
    SymMatrix mass;
    SymMatrix Q;
};

MaximalityResult maximality_check(const NetworkMedium& medium, const SolverOptions& options = {});

/// Strictly positive weights balancing every node, sampled from the null space
/// of the balance operator; std::nullopt when no such weights exist.
std::optional<PeriodicNetwork> stationary_weights(const PeriodicNetwork& net, std::uint64_t seed);

struct Valency {
    std::vector<int> per_node;
    int max = 0;
};

Valency valency(const PeriodicNetwork& net);

enum class Reducibility { Irreducible, Reducible, Unknown };

std::string_view to_string(Reducibility r);

struct IrreducibilityResult {
    Reducibility verdict = Reducibility::Unknown;
    /// Edge ids of two proper balanced subnetworks whose union is every edge.
    std::vector<int> witness_a;
    std::vector<int> witness_b;
    long long checked_subsets = 0;
};

/// Exhaustive search over balanced edge subsets (support edges only). Verdict is
/// Unknown when the network has more than budget_edges support edges.
IrreducibilityResult irreducible(const PeriodicNetwork& net, int budget_edges = 16);

struct BallMassProfile {
    TorusPoint center;
    std::vector<double> radii;
    std::vector<double> masses;
};

/// Exact ‖θ‖(B_r(center)) for each radius (0 < r < 1/2, increasing).
BallMassProfile ball_mass_profile(const NetworkMedium& medium, const TorusPoint& center, std::vector<double> radii);

struct MonotonicityResult {
    bool pass = true;
    double worst_violation = 0.0;
    int worst_center = -1;
    std::vector<BallMassProfile> profiles;
};

/// mass(r)/r^alpha nondecreasing along the radii at every center, up to slack
/// 1e-12 * (largest mass).
MonotonicityResult monotonicity_check(const NetworkMedium& medium, const std::vector<TorusPoint>& centers,
                                      const std::vector<double>& radii, double alpha, int threads = 0);

struct LocalDimension {
    double lower = 0.0;
    double upper = 0.0;
    /// Least-squares slope over the whole smallest decade.
    double slope = 0.0;
};

/// Slopes of log mass against log r over the smallest decade of radii; lower and
/// upper are the extreme slopes over sub-windows spanning at least half a decade.
LocalDimension estimate_local_dimension(const BallMassProfile& profile);

/// Points on the support drawn with probability proportional to edge length.
std::vector<TorusPoint> sample_support_points(const PeriodicNetwork& net, int count, std::uint64_t seed);

}  // namespace reticulate
