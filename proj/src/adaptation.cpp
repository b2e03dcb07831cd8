#include "reticulate/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "detail/laplacian.hpp"
#include "reticulate/parallel.hpp"
#include "reticulate/random.hpp"

namespace reticulate {

namespace {

// Every edge with positive weight conducts, so edges frozen at the floor keep
// their components connected.
std::vector<detail::GraphEdge> conductance_graph(const PeriodicNetwork& net) {
    std::vector<detail::GraphEdge> graph;
    graph.reserve(static_cast<std::size_t>(net.edge_count()));
    for (int e = 0; e < net.edge_count(); ++e) {
        const Edge& ed = net.edge(e);
        if (ed.weight > 0.0) graph.push_back({ed.u, ed.v, ed.weight / net.length(e)});
    }
    return graph;
}

double total_mass(const PeriodicNetwork& net) {
    double m = 0.0;
    for (int e = 0; e < net.edge_count(); ++e) m += net.edge(e).weight * net.length(e);
    return m;
}

Eigen::VectorXd solve_system(const detail::LaplacianSystem& system, const Eigen::VectorXd& injection, double tol) {
    std::vector<double> net_mass(static_cast<std::size_t>(system.component_count()), 0.0);
    for (int i = 0; i < system.node_count(); ++i) net_mass[static_cast<std::size_t>(system.component(i))] += injection[i];
    const double scale = std::max(1.0, injection.lpNorm<Eigen::Infinity>());
    for (std::size_t c = 0; c < net_mass.size(); ++c)
        if (std::abs(net_mass[c]) > 1e-12 * scale) throw UnbalancedInjection(static_cast<int>(c), net_mass[c]);

    const int budget = std::max(20, 20 * std::max(1, system.node_count()));
    detail::SolveResult s = system.solve(injection, tol, budget);
    if (s.residual > tol) throw SolveFailure(s.residual, s.iterations);
    return std::move(s.x);
}

}  // namespace

Eigen::VectorXd darcy_solve(const PeriodicNetwork& net, const Eigen::VectorXd& injection, double tol) {
    if (injection.size() != net.node_count()) throw InvalidArgument("injection must have one entry per node");
    const detail::LaplacianSystem system(net.node_count(), conductance_graph(net));
    return solve_system(system, injection, tol);
}

Eigen::VectorXd draw_injection(const PeriodicNetwork& net, const FluctuationModel& model, std::uint64_t sample_seed) {
    const int nodes = net.node_count();
    if (model.source_node < 0 || model.source_node >= nodes) throw InvalidArgument("source node out of range");
    if (model.patch_count < 1) throw InvalidArgument("patch count must be at least 1");
    if (!(model.patch_strength > 0.0)) throw InvalidArgument("patch strength must be positive");

    Eigen::VectorXd m = Eigen::VectorXd::Zero(nodes);
    const double s = model.patch_strength;
    m[model.source_node] += model.patch_count * s;
    if (model.kind == FluctuationModel::Kind::FixedSink) {
        if (model.sink_node < 0 || model.sink_node >= nodes || model.sink_node == model.source_node)
            throw InvalidArgument("fixed sink must be a node other than the source");
        m[model.sink_node] -= model.patch_count * s;
        return m;
    }

    // Sinks are drawn from the source's component so every pattern is solvable.
    const detail::LaplacianSystem system(nodes, conductance_graph(net));
    std::vector<int> pool;
    for (int i = 0; i < nodes; ++i)
        if (i != model.source_node && system.component(i) == system.component(model.source_node)) pool.push_back(i);
    if (static_cast<int>(pool.size()) < model.patch_count)
        throw InvalidArgument("patch count exceeds the nodes reachable from the source");
    Rng rng(sample_seed);
    for (int j = 0; j < model.patch_count; ++j) {
        const auto pick = static_cast<std::size_t>(j) + rng.below(pool.size() - static_cast<std::size_t>(j));
        std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
        m[pool[static_cast<std::size_t>(j)]] -= s;
    }
    return m;
}

DissipationGradient dissipation_gradient(const PeriodicNetwork& net, const std::vector<Eigen::VectorXd>& injections,
                                         double tol, int threads) {
    const detail::LaplacianSystem system(net.node_count(), conductance_graph(net));
    std::vector<Eigen::VectorXd> phis(injections.size());
    parallel_for(
        static_cast<int>(injections.size()),
        [&](int r) { phis[static_cast<std::size_t>(r)] = solve_system(system, injections[static_cast<std::size_t>(r)], tol); },
        threads);

    DissipationGradient out;
    out.gradient.assign(static_cast<std::size_t>(net.edge_count()), 0.0);
    if (injections.empty()) return out;
    for (const Eigen::VectorXd& phi : phis) {
        for (int e = 0; e < net.edge_count(); ++e) {
            const Edge& ed = net.edge(e);
            const double len = net.length(e);
            const double drop = phi[ed.v] - phi[ed.u];
            out.gradient[static_cast<std::size_t>(e)] += (drop / len) * (drop / len);
            out.dissipation += ed.weight / len * drop * drop;
        }
    }
    const double count = static_cast<double>(injections.size());
    for (double& g : out.gradient) g /= count;
    out.dissipation /= count;
    return out;
}

double stability_threshold(const PeriodicNetwork& net, const std::vector<double>& gradient) {
    double lg = 0.0;
    for (int e = 0; e < net.edge_count(); ++e) lg += net.length(e) * gradient[static_cast<std::size_t>(e)];
    return lg > 0.0 ? 0.1 * total_mass(net) / lg : 0.0;
}

std::vector<double> adaptation_step(const PeriodicNetwork& net, const std::vector<double>& gradient, double dt,
                                    std::vector<int>* clamped) {
    const double before = total_mass(net);
    std::vector<double> w(static_cast<std::size_t>(net.edge_count()));
    double after = 0.0;
    for (int e = 0; e < net.edge_count(); ++e) {
        w[static_cast<std::size_t>(e)] = net.edge(e).weight + dt * gradient[static_cast<std::size_t>(e)];
        after += w[static_cast<std::size_t>(e)] * net.length(e);
    }
    const double scale = after > 0.0 ? before / after : 1.0;
    for (int e = 0; e < net.edge_count(); ++e) {
        double& a = w[static_cast<std::size_t>(e)];
        a *= scale;
        if (a < kWeightFloor) {
            a = kWeightFloor;
            if (clamped) clamped->push_back(e);
        }
    }
    return w;
}

AdaptationTrace adapt(const NetworkMedium& medium, const FluctuationModel& model, const AdaptOptions& options) {
    if (!(options.dt >= 0.0)) throw InvalidArgument("dt must be non-negative");
    if (options.steps < 0 || options.samples_per_step < 1 || options.trace_stride < 1)
        throw InvalidArgument("steps >= 0, samples >= 1 and stride >= 1 are required");
    PeriodicNetwork net = medium.network;
    for (const Edge& e : net.edges())
        if (!(e.weight > 0.0)) throw InvalidArgument("adaptation needs strictly positive initial weights");

    AdaptationTrace trace;
    for (int t = 0; t <= options.steps; ++t) {
        std::vector<Eigen::VectorXd> injections;
        injections.reserve(static_cast<std::size_t>(options.samples_per_step));
        for (int r = 0; r < options.samples_per_step; ++r)
            injections.push_back(draw_injection(net, model, derive_seed(model.seed, static_cast<std::uint64_t>(t),
                                                                         static_cast<std::uint64_t>(r))));
        const DissipationGradient grad = dissipation_gradient(net, injections, options.solver.tol, options.threads);

        if (t % options.trace_stride == 0 || t == options.steps) {
            AdaptationStep rec;
            rec.t = t;
            for (const Edge& e : net.edges()) rec.weights.push_back(e.weight);
            rec.Q = effective_tensor({net, medium.mode}, options.solver).Q;
            const Spectrum sp = spectrum(rec.Q);
            rec.lambda_min = sp.values[0];
            rec.lambda_max = sp.values[sp.values.size() - 1];
            rec.lambda_min_ratio = rec.lambda_max > 0.0 ? rec.lambda_min / rec.lambda_max : 0.0;
            rec.dissipation = grad.dissipation;
            rec.total_mass = total_mass(net);
            trace.steps.push_back(std::move(rec));
        }
        if (t == options.steps) break;

        std::vector<int> clamped;
        const std::vector<double> w = adaptation_step(net, grad.gradient, options.dt, &clamped);
        for (int e : clamped) trace.events.push_back({t, e, "WeightUnderflow"});
        for (int e = 0; e < net.edge_count(); ++e) net.set_weight(e, w[static_cast<std::size_t>(e)]);
    }
    return trace;
}

}  // namespace reticulate
