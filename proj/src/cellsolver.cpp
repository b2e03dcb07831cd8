#include "reticulate/cellsolver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "detail/laplacian.hpp"
#include "reticulate/parallel.hpp"

namespace reticulate {

namespace {

// Edge of an energy Σ c (φ_b - φ_a + p·d)^2.
struct EnergyEdge {
    int a = 0;
    int b = 0;
    double c = 0.0;
    Eigen::VectorXd d;
};

struct FormResult {
    SymMatrix Q;
    double residual = 0.0;
    int components = 0;
};

// Right-hand side of the normal equations for direction p.
Eigen::VectorXd normal_rhs(int node_count, const std::vector<EnergyEdge>& edges, const Eigen::VectorXd& p) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(node_count);
    for (const EnergyEdge& e : edges) {
        if (e.a == e.b) continue;
        const double t = e.c * p.dot(e.d);
        rhs[e.a] += t;
        rhs[e.b] -= t;
    }
    return rhs;
}

std::vector<Eigen::VectorXd> minimizers(int node_count, const std::vector<EnergyEdge>& edges,
                                        const std::vector<bool>& pinned, const std::vector<Eigen::VectorXd>& directions,
                                        const SolverOptions& options, double& residual, int* components = nullptr) {
    std::vector<detail::GraphEdge> graph;
    graph.reserve(edges.size());
    for (const EnergyEdge& e : edges) graph.push_back({e.a, e.b, e.c});
    const detail::LaplacianSystem system(node_count, graph, pinned);
    if (components) *components = system.component_count();

    const int budget = std::max(20, options.budget_factor * std::max(1, node_count));
    std::vector<detail::SolveResult> solved(directions.size());
    parallel_for(
        static_cast<int>(directions.size()),
        [&](int i) {
            solved[static_cast<std::size_t>(i)] =
                system.solve(normal_rhs(node_count, edges, directions[static_cast<std::size_t>(i)]), options.tol, budget);
        },
        options.threads);

    residual = 0.0;
    std::vector<Eigen::VectorXd> out;
    for (auto& s : solved) {
        if (s.residual > options.tol) throw SolveFailure(s.residual, s.iterations);
        residual = std::max(residual, s.residual);
        out.push_back(std::move(s.x));
    }
    return out;
}

// Gradient of the corrected potential along each edge: φ_b - φ_a + p·d.
Eigen::VectorXd edge_gradients(const std::vector<EnergyEdge>& edges, const Eigen::VectorXd& phi, const Eigen::VectorXd& p) {
    Eigen::VectorXd g(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const EnergyEdge& e = edges[k];
        g[static_cast<Eigen::Index>(k)] = phi[e.b] - phi[e.a] + p.dot(e.d);
    }
    return g;
}

// Bilinear form (p_i, p_j) at the minimizers for the standard basis: the
// polarization of the minimal energy.
FormResult quadratic_form(int n, int node_count, const std::vector<EnergyEdge>& edges, const std::vector<bool>& pinned,
                          const SolverOptions& options) {
    std::vector<Eigen::VectorXd> basis;
    for (int i = 0; i < n; ++i) basis.push_back(Eigen::VectorXd::Unit(n, i));
    FormResult out;
    const auto phis = minimizers(node_count, edges, pinned, basis, options, out.residual, &out.components);
    std::vector<Eigen::VectorXd> grads;
    for (int i = 0; i < n; ++i) grads.push_back(edge_gradients(edges, phis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(i)]));
    Eigen::VectorXd c(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t k = 0; k < edges.size(); ++k) c[static_cast<Eigen::Index>(k)] = edges[k].c;
    out.Q = SymMatrix(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            out.Q.set(i, j, (c.array() * grads[static_cast<std::size_t>(i)].array() * grads[static_cast<std::size_t>(j)].array()).sum());
    return out;
}

std::vector<EnergyEdge> cell_edges(const PeriodicNetwork& net) {
    std::vector<EnergyEdge> edges;
    for (int e = 0; e < net.edge_count(); ++e) {
        if (!net.in_support(e)) continue;
        Eigen::VectorXd d = net.displacement(e);
        const double len = d.norm();
        edges.push_back({net.edge(e).u, net.edge(e).v, net.edge(e).weight / len, std::move(d)});
    }
    return edges;
}

}  // namespace

EffectiveTensor effective_tensor(const NetworkMedium& medium, const SolverOptions& options) {
    const PeriodicNetwork& net = medium.network;
    const auto edges = cell_edges(net);
    FormResult form = quadratic_form(net.dimension(), net.node_count(), edges, {}, options);

    std::set<int> touched;
    for (const EnergyEdge& e : edges) {
        touched.insert(e.a);
        touched.insert(e.b);
    }
    // Components of the support: count distinct solver components among nodes
    // carrying at least one support edge.
    std::vector<detail::GraphEdge> graph;
    for (const EnergyEdge& e : edges) graph.push_back({e.a, e.b, e.c});
    const detail::LaplacianSystem system(net.node_count(), graph);
    std::set<int> comps;
    for (int node : touched) comps.insert(system.component(node));

    // Where the exact edge gradients vanish only squared round-off is left, of
    // order eps^2 * Σ aℓ; such eigenvalues are flushed to an exact zero.
    double mass_trace = 0.0;
    for (const EnergyEdge& e : edges) mass_trace += e.c * e.d.squaredNorm();
    const Spectrum s = spectrum(form.Q);
    const double floor = kRoundoffFloor * mass_trace;
    if ((s.values.array().abs() <= floor).any()) {
        const Eigen::VectorXd kept = (s.values.array().abs() <= floor).select(0.0, s.values);
        form.Q = SymMatrix::from_dense(s.vectors * kept.asDiagonal() * s.vectors.transpose());
    }
    return {std::move(form.Q), form.residual, static_cast<int>(comps.size())};
}

double effective_bilinear(const NetworkMedium& medium, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                          const SolverOptions& options) {
    const PeriodicNetwork& net = medium.network;
    if (p.size() != net.dimension() || q.size() != net.dimension())
        throw InvalidArgument("direction has wrong dimension");
    const auto edges = cell_edges(net);
    double residual = 0.0;
    const auto phis = minimizers(net.node_count(), edges, {}, {p, q}, options, residual);
    const Eigen::VectorXd gp = edge_gradients(edges, phis[0], p);
    const Eigen::VectorXd gq = edge_gradients(edges, phis[1], q);
    double sum = 0.0;
    for (std::size_t k = 0; k < edges.size(); ++k)
        sum += edges[k].c * gp[static_cast<Eigen::Index>(k)] * gq[static_cast<Eigen::Index>(k)];
    return sum;
}

PeriodicNetwork subdivide(const PeriodicNetwork& net, const std::vector<int>& parts) {
    if (!parts.empty() && static_cast<int>(parts.size()) != net.edge_count())
        throw InvalidArgument("parts must list one count per edge");
    const int n = net.dimension();
    PeriodicNetwork out(n);
    for (const TorusPoint& p : net.nodes()) out.add_node(p);
    for (int e = 0; e < net.edge_count(); ++e) {
        const int m = parts.empty() ? 1 : parts[static_cast<std::size_t>(e)];
        if (m < 1) throw InvalidArgument("parts per edge must be >= 1");
        const Edge& ed = net.edge(e);
        const Eigen::VectorXd start = net.node(ed.u).vec();
        const Eigen::VectorXd d = net.displacement(e);
        int prev = ed.u;
        Eigen::VectorXd prev_lift = start;  // lifted position of `prev`
        for (int k = 1; k <= m; ++k) {
            int next;
            if (k == m) {
                next = ed.v;
            } else {
                Eigen::VectorXd pos = start + (static_cast<double>(k) / m) * d;
                std::vector<double> coords(pos.data(), pos.data() + n);
                next = out.add_node(TorusPoint(coords));
            }
            const Eigen::VectorXd target = start + (static_cast<double>(k) / m) * d;
            // Crossing vector chosen so the lifted piece follows the original edge.
            IntVec z(static_cast<std::size_t>(n));
            const Eigen::VectorXd wanted = out.node(prev).vec() + (target - prev_lift);
            for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = std::llround(wanted[i] - out.node(next)[i]);
            out.add_edge(prev, next, std::move(z), ed.weight);
            prev = next;
            prev_lift = target;
        }
    }
    return out;
}

HomogenizationTrace homogenize_window(const NetworkMedium& medium, std::vector<int> R_list, const WindowOptions& options) {
    const PeriodicNetwork& net = medium.network;
    const int n = net.dimension();
    std::sort(R_list.begin(), R_list.end());
    R_list.erase(std::unique(R_list.begin(), R_list.end()), R_list.end());

    struct Lifted {
        int e;
        Eigen::VectorXd start, d, lo, hi;
        double a, len;
    };
    std::vector<Lifted> lifted;
    for (int e = 0; e < net.edge_count(); ++e) {
        if (!net.in_support(e)) continue;
        Lifted l;
        l.e = e;
        l.start = net.node(net.edge(e).u).vec();
        l.d = net.displacement(e);
        l.lo = l.start.cwiseMin(l.start + l.d);
        l.hi = l.start.cwiseMax(l.start + l.d);
        l.a = net.edge(e).weight;
        l.len = l.d.norm();
        lifted.push_back(std::move(l));
    }

    HomogenizationTrace trace;
    for (int R : R_list) {
        if (R < 1) throw InvalidArgument("window half-width R must be >= 1");
        const auto tick = std::chrono::steady_clock::now();
        const double box = static_cast<double>(R);
        constexpr double eps = 1e-12;

        // Translates of each edge that can meet the box, and a node-count estimate.
        long long estimate = 0;
        std::vector<std::vector<std::pair<int, int>>> ranges(lifted.size());
        for (std::size_t k = 0; k < lifted.size(); ++k) {
            long long count = 1;
            for (int i = 0; i < n; ++i) {
                const int from = static_cast<int>(std::ceil(-box - lifted[k].hi[i] - eps));
                const int to = static_cast<int>(std::floor(box - lifted[k].lo[i] + eps));
                ranges[k].push_back({from, to});
                count *= std::max(0, to - from + 1);
            }
            estimate += 2 * count;
        }
        if (estimate > options.node_budget) throw BudgetExceeded(R, estimate);

        std::map<std::pair<int, std::vector<int>>, int> node_ids;  // (node, translate)
        std::vector<Eigen::VectorXd> positions;
        std::vector<char> exits;  // cut point, or endpoint of a truncated edge
        std::vector<EnergyEdge> edges;
        auto on_boundary = [&](const Eigen::VectorXd& y) {
            for (int i = 0; i < n; ++i)
                if (std::abs(std::abs(y[i]) - box) <= 1e-9) return true;
            return false;
        };
        auto node_id = [&](int node, const std::vector<int>& translate, const Eigen::VectorXd& y) {
            auto [it, inserted] = node_ids.try_emplace({node, translate}, static_cast<int>(positions.size()));
            if (inserted) {
                positions.push_back(y);
                exits.push_back(0);
            }
            return it->second;
        };
        auto cut_node = [&](const Eigen::VectorXd& y) {
            positions.push_back(y);
            exits.push_back(1);
            return static_cast<int>(positions.size()) - 1;
        };

        for (std::size_t k = 0; k < lifted.size(); ++k) {
            const Lifted& l = lifted[k];
            const Edge& ed = net.edge(l.e);
            bool any = true;
            std::vector<int> t(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                t[static_cast<std::size_t>(i)] = ranges[k][static_cast<std::size_t>(i)].first;
                if (ranges[k][static_cast<std::size_t>(i)].first > ranges[k][static_cast<std::size_t>(i)].second) any = false;
            }
            while (any) {
                Eigen::VectorXd s = l.start;
                for (int i = 0; i < n; ++i) s[i] += t[static_cast<std::size_t>(i)];
                // Clip s + τ d, τ ∈ [0,1], to the box. The box is half-open so
                // that it holds exactly (2R)^n copies of the cell: pieces lying
                // in an upper face are excluded.
                double t0 = 0.0, t1 = 1.0;
                bool keep = true;
                for (int i = 0; i < n && keep; ++i) {
                    if (std::abs(l.d[i]) < 1e-15) {
                        if (s[i] < -box - eps || s[i] >= box - eps) keep = false;
                        continue;
                    }
                    double ta = (-box - s[i]) / l.d[i];
                    double tb = (box - s[i]) / l.d[i];
                    if (ta > tb) std::swap(ta, tb);
                    t0 = std::max(t0, ta);
                    t1 = std::min(t1, tb);
                }
                if (keep && (t1 - t0) * l.len > 1e-12) {
                    if (t0 < 1e-12) t0 = 0.0;
                    if (t1 > 1.0 - 1e-12) t1 = 1.0;
                    const bool truncated = t0 > 0.0 || t1 < 1.0;
                    const Eigen::VectorXd p0 = s + t0 * l.d;
                    const Eigen::VectorXd p1 = s + t1 * l.d;
                    const int a = t0 == 0.0 ? node_id(ed.u, t, p0) : cut_node(p0);
                    int b;
                    if (t1 == 1.0) {
                        std::vector<int> th = t;
                        for (int i = 0; i < n; ++i) th[static_cast<std::size_t>(i)] += static_cast<int>(ed.shift[static_cast<std::size_t>(i)]);
                        b = node_id(ed.v, th, p1);
                    } else {
                        b = cut_node(p1);
                    }
                    if (truncated) exits[static_cast<std::size_t>(a)] = exits[static_cast<std::size_t>(b)] = 1;
                    edges.push_back({a, b, l.a / ((t1 - t0) * l.len), p1 - p0});
                }
                int i = 0;
                for (; i < n; ++i) {
                    if (++t[static_cast<std::size_t>(i)] <= ranges[k][static_cast<std::size_t>(i)].second) break;
                    t[static_cast<std::size_t>(i)] = ranges[k][static_cast<std::size_t>(i)].first;
                }
                if (i == n) break;
            }
        }

        const int node_count = static_cast<int>(positions.size());
        std::vector<bool> pinned(static_cast<std::size_t>(node_count));
        for (int v = 0; v < node_count; ++v)
            pinned[static_cast<std::size_t>(v)] = exits[static_cast<std::size_t>(v)] || on_boundary(positions[static_cast<std::size_t>(v)]);

        HomogenizationWindow w;
        w.R = R;
        w.node_count = node_count;
        if (edges.empty()) {
            w.Q_R = SymMatrix(n);
        } else {
            FormResult form = quadratic_form(n, node_count, edges, pinned, options.solver);
            w.Q_R = form.Q * (1.0 / std::pow(2.0 * box, n));
        }
        w.solve_time = std::chrono::steady_clock::now() - tick;
        trace.windows.push_back(std::move(w));
    }
    return trace;
}

}  // namespace reticulate
