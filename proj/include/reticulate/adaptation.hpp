#pragma once

// Darcy flow on the network under random source/sink fluctuations and the
// mass-preserving dissipation-gradient flow on edge conductances.

#include <cstdint>
#include <string>
#include <vector>

#include "reticulate/cellsolver.hpp"
#include "reticulate/core.hpp"

namespace reticulate {

/// Weights never drop below this floor during adaptation.
inline constexpr double kWeightFloor = 1e-14;

/// Solves L(a) φ = m with conductances a/ℓ. Each connected component of the
/// support gets zero-mean φ; nodes off the support get φ = 0.
/// Throws UnbalancedInjection when a component's injection does not sum to 0.
Eigen::VectorXd darcy_solve(const PeriodicNetwork& net, const Eigen::VectorXd& injection,
                            double tol = kTolSolve);

struct FluctuationModel {
    enum class Kind { Random, FixedSink };

    int source_node = 0;
    int patch_count = 1;
    double patch_strength = 1.0;
    Kind kind = Kind::Random;
    /// Sink node in FixedSink mode.
    int sink_node = 0;
    std::uint64_t seed = 0;
};

/// One injection pattern: +k·s at the source, −s at each of k sinks.
Eigen::VectorXd draw_injection(const PeriodicNetwork& net, const FluctuationModel& model, std::uint64_t sample_seed);

struct AdaptationStep {
    int t = 0;
    std::vector<double> weights;
    SymMatrix Q;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double lambda_min_ratio = 0.0;
    /// Mean over samples of Σ c_e (Δφ_e)^2 at the weights of this step.
    double dissipation = 0.0;
    double total_mass = 0.0;
};

struct AdaptationEvent {
    int t = 0;
    int edge = 0;
    std::string what;
};

struct AdaptationTrace {
    std::vector<AdaptationStep> steps;
    std::vector<AdaptationEvent> events;
};

struct AdaptOptions {
    int steps = 100;
    int samples_per_step = 16;
    double dt = 0.1;
    /// Record every trace_stride steps; step 0 and the final step are always recorded.
    int trace_stride = 1;
    int threads = 0;
    SolverOptions solver;
};

/// Per step: g_e = mean over samples of (Δφ_e/ℓ_e)^2, a ← a + dt·g, then the
/// weights are rescaled so Σ a ℓ keeps its initial value.
AdaptationTrace adapt(const NetworkMedium& medium, const FluctuationModel& model, const AdaptOptions& options);

/// Per-edge gradient g_e and mean dissipation for fixed injections.
struct DissipationGradient {
    std::vector<double> gradient;
    double dissipation = 0.0;
};

DissipationGradient dissipation_gradient(const PeriodicNetwork& net, const std::vector<Eigen::VectorXd>& injections,
                                         double tol = kTolSolve, int threads = 0);

/// Step size below which the renormalized explicit step is expected to lower
/// the dissipation: 0.1 · (Σ a ℓ) / (Σ ℓ g).
double stability_threshold(const PeriodicNetwork& net, const std::vector<double>& gradient);

/// One renormalized explicit step a ← (a + dt·g)·M/M'. Entries below the floor
/// are clamped and reported in `clamped`.
std::vector<double> adaptation_step(const PeriodicNetwork& net, const std::vector<double>& gradient, double dt,
                                    std::vector<int>* clamped = nullptr);

}  // namespace reticulate
