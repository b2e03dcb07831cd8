#include "reticulate/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>

#include "detail/simplex.hpp"
#include "reticulate/parallel.hpp"
#include "reticulate/random.hpp"

namespace reticulate {

namespace {

double max_weight(const PeriodicNetwork& net) {
    double w = 0.0;
    for (const Edge& e : net.edges()) w = std::max(w, e.weight);
    return w;
}

std::vector<int> support_edges(const PeriodicNetwork& net) {
    std::vector<int> ids;
    for (int e = 0; e < net.edge_count(); ++e)
        if (net.in_support(e)) ids.push_back(e);
    return ids;
}

}  // namespace

BalanceReport balance_report(const NetworkMedium& medium) {
    const PeriodicNetwork& net = medium.network;
    const int n = net.dimension();
    std::vector<Eigen::VectorXd> res(static_cast<std::size_t>(net.node_count()), Eigen::VectorXd::Zero(n));
    for (int e : support_edges(net)) {
        const Edge& ed = net.edge(e);
        if (ed.u == ed.v) continue;  // both outgoing tangents cancel
        const Eigen::VectorXd t = ed.weight * net.tangent(e);
        res[static_cast<std::size_t>(ed.u)] += t;
        res[static_cast<std::size_t>(ed.v)] -= t;
    }
    BalanceReport report;
    for (int v = 0; v < net.node_count(); ++v) {
        const double norm = res[static_cast<std::size_t>(v)].norm();
        report.max_residual = std::max(report.max_residual, norm);
        report.per_node.push_back({v, std::move(res[static_cast<std::size_t>(v)]), norm});
    }
    report.balanced = report.max_residual <= kTolBalance * max_weight(net);
    if (medium.mode == Mode::Isotropic)
        report.note = "isotropic medium: residual evaluated on the tangential submedium";
    return report;
}

double tol_wiener(const SymMatrix& mass) { return 1e-8 * (1.0 + mass.frobenius()); }

MaximalityResult maximality_check(const NetworkMedium& medium, const SolverOptions& options) {
    MaximalityResult out;
    out.mass = mass_tensor(medium);
    out.Q = effective_tensor(medium, options).Q;
    out.gap = out.mass - out.Q;
    out.gap_norm = out.gap.frobenius();
    out.is_maximal = out.gap_norm <= tol_wiener(out.mass);
    return out;
}

std::optional<PeriodicNetwork> stationary_weights(const PeriodicNetwork& net, std::uint64_t seed) {
    const int n = net.dimension();
    const int m = net.edge_count();
    if (m == 0) return std::nullopt;

    // Balance operator: weights -> stacked node residuals.
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) * net.node_count(), m);
    for (int e = 0; e < m; ++e) {
        const Edge& ed = net.edge(e);
        if (ed.u == ed.v) continue;
        const Eigen::VectorXd t = net.tangent(e);
        B.block(static_cast<Eigen::Index>(ed.u) * n, e, n, 1) += t;
        B.block(static_cast<Eigen::Index>(ed.v) * n, e, n, 1) -= t;
    }
    Eigen::MatrixXd null;
    if (B.isZero(0.0)) {
        null = Eigen::MatrixXd::Identity(m, m);
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double cut = 1e-10 * sv[0];
        int rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv[i] > cut) ++rank;
        null = svd.matrixV().rightCols(m - rank);
    }
    const auto d = static_cast<int>(null.cols());
    if (d == 0) return std::nullopt;

    // maximize t  s.t.  N c >= t 1,  1·N c = 1,  with c = c+ - c-.
    // Columns: c+ (d), c- (d), t, slacks (m).
    const int cols = 2 * d + 1 + m;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, cols);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
    A.block(0, 0, m, d) = null;
    A.block(0, d, m, d) = -null;
    A.col(2 * d).head(m).setConstant(-1.0);
    A.block(0, 2 * d + 1, m, m) = -Eigen::MatrixXd::Identity(m, m);
    const Eigen::RowVectorXd colsum = null.colwise().sum();
    A.block(m, 0, 1, d) = colsum;
    A.block(m, d, 1, d) = -colsum;
    b[m] = 1.0;
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
    cost[2 * d] = -1.0;
    const detail::LpResult lp = detail::solve_standard_lp(A, b, cost);
    if (lp.status != detail::LpStatus::Optimal) return std::nullopt;

    const Eigen::VectorXd coeff = lp.x.head(d) - lp.x.segment(d, d);
    Eigen::VectorXd w = null * coeff;
    if (!(w.minCoeff() > kStationaryMargin * w.maxCoeff())) return std::nullopt;

    // Random perturbation inside the null space that keeps every weight above
    // half of the centred minimum.
    Rng rng(seed);
    Eigen::VectorXd g(d);
    for (int i = 0; i < d; ++i) g[i] = rng.normal();
    Eigen::VectorXd dir = null * g;
    const double peak = dir.lpNorm<Eigen::Infinity>();
    if (peak > 0.0) w += (0.5 * w.minCoeff() / peak) * rng.uniform(-1.0, 1.0) * dir;
    w /= w.maxCoeff();
    w = null * (null.transpose() * w);

    PeriodicNetwork out = net;
    for (int e = 0; e < m; ++e) out.set_weight(e, w[e]);
    return out;
}

Valency valency(const PeriodicNetwork& net) {
    Valency v;
    v.per_node.assign(static_cast<std::size_t>(net.node_count()), 0);
    for (int e : support_edges(net)) {
        v.per_node[static_cast<std::size_t>(net.edge(e).u)] += 1;
        v.per_node[static_cast<std::size_t>(net.edge(e).v)] += 1;
    }
    for (int x : v.per_node) v.max = std::max(v.max, x);
    return v;
}

std::string_view to_string(Reducibility r) {
    switch (r) {
        case Reducibility::Irreducible: return "Irreducible";
        case Reducibility::Reducible: return "Reducible";
        case Reducibility::Unknown: return "Unknown";
    }
    return "?";
}

IrreducibilityResult irreducible(const PeriodicNetwork& net, int budget_edges) {
    const BalanceReport report = balance_report({net, Mode::Tangential});
    if (!report.balanced) throw NotStationary(report.max_residual);

    IrreducibilityResult result;
    const std::vector<int> edges = support_edges(net);
    const int m = static_cast<int>(edges.size());
    if (m > budget_edges || m > 63 || m == 0) return result;
    const int n = net.dimension();
    const double tol = kTolBalance * max_weight(net);

    // Order nodes breadth-first and edges by the later of their endpoints so
    // each node's balance is decided as early as possible.
    std::vector<std::vector<int>> incident(static_cast<std::size_t>(net.node_count()));
    for (int k = 0; k < m; ++k) {
        const Edge& ed = net.edge(edges[static_cast<std::size_t>(k)]);
        incident[static_cast<std::size_t>(ed.u)].push_back(k);
        if (ed.v != ed.u) incident[static_cast<std::size_t>(ed.v)].push_back(k);
    }
    std::vector<int> rank(static_cast<std::size_t>(net.node_count()), -1);
    int next_rank = 0;
    for (int k = 0; k < m; ++k) {
        const int start = net.edge(edges[static_cast<std::size_t>(k)]).u;
        if (rank[static_cast<std::size_t>(start)] >= 0) continue;
        std::queue<int> q;
        q.push(start);
        rank[static_cast<std::size_t>(start)] = next_rank++;
        while (!q.empty()) {
            const int x = q.front();
            q.pop();
            for (int kk : incident[static_cast<std::size_t>(x)]) {
                const Edge& ed = net.edge(edges[static_cast<std::size_t>(kk)]);
                for (int y : {ed.u, ed.v}) {
                    if (rank[static_cast<std::size_t>(y)] >= 0) continue;
                    rank[static_cast<std::size_t>(y)] = next_rank++;
                    q.push(y);
                }
            }
        }
    }
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](int k) {
        const Edge& ed = net.edge(edges[static_cast<std::size_t>(k)]);
        const int a = rank[static_cast<std::size_t>(ed.u)];
        const int b = rank[static_cast<std::size_t>(ed.v)];
        return std::pair{std::max(a, b), std::min(a, b)};
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key(a) < key(b); });

    // Contribution of each ordered edge at its endpoints, and the nodes whose
    // last incident edge is at a given position.
    struct Contribution {
        int node;
        Eigen::VectorXd vec;
    };
    std::vector<std::vector<Contribution>> contrib(static_cast<std::size_t>(m));
    std::vector<int> last_pos(static_cast<std::size_t>(net.node_count()), -1);
    for (int pos = 0; pos < m; ++pos) {
        const int e = edges[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])];
        const Edge& ed = net.edge(e);
        last_pos[static_cast<std::size_t>(ed.u)] = pos;
        last_pos[static_cast<std::size_t>(ed.v)] = pos;
        if (ed.u == ed.v) continue;
        const Eigen::VectorXd t = ed.weight * net.tangent(e);
        contrib[static_cast<std::size_t>(pos)].push_back({ed.u, t});
        contrib[static_cast<std::size_t>(pos)].push_back({ed.v, -t});
    }
    std::vector<std::vector<int>> closing(static_cast<std::size_t>(m));
    for (int v = 0; v < net.node_count(); ++v)
        if (last_pos[static_cast<std::size_t>(v)] >= 0) closing[static_cast<std::size_t>(last_pos[static_cast<std::size_t>(v)])].push_back(v);

    constexpr std::size_t kCandidateCap = 1u << 20;
    const std::uint64_t full = (m == 64) ? ~0ULL : ((1ULL << m) - 1);
    std::vector<std::uint64_t> candidates;  // masks over ordered positions
    std::vector<Eigen::VectorXd> residual(static_cast<std::size_t>(net.node_count()), Eigen::VectorXd::Zero(n));
    bool overflow = false;

    std::function<void(int, std::uint64_t)> search = [&](int pos, std::uint64_t mask) {
        if (overflow) return;
        if (pos == m) {
            ++result.checked_subsets;
            if (mask != 0 && mask != full) {
                candidates.push_back(mask);
                if (candidates.size() > kCandidateCap) overflow = true;
            }
            return;
        }
        for (int include = 0; include < 2; ++include) {
            if (include)
                for (const auto& c : contrib[static_cast<std::size_t>(pos)]) residual[static_cast<std::size_t>(c.node)] += c.vec;
            bool ok = true;
            for (int v : closing[static_cast<std::size_t>(pos)])
                if (residual[static_cast<std::size_t>(v)].norm() > tol) ok = false;
            if (ok) search(pos + 1, include ? (mask | (1ULL << pos)) : mask);
            if (include)
                for (const auto& c : contrib[static_cast<std::size_t>(pos)]) residual[static_cast<std::size_t>(c.node)] -= c.vec;
        }
    };
    search(0, 0);
    if (overflow) return result;

    auto to_edges = [&](std::uint64_t mask) {
        std::vector<int> ids;
        for (int pos = 0; pos < m; ++pos)
            if (mask & (1ULL << pos)) ids.push_back(edges[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])]);
        std::sort(ids.begin(), ids.end());
        return ids;
    };
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const std::uint64_t missing = full & ~candidates[i];
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            if (i == j) continue;
            if ((candidates[j] & missing) == missing) {
                result.verdict = Reducibility::Reducible;
                result.witness_a = to_edges(candidates[i]);
                result.witness_b = to_edges(candidates[j]);
                return result;
            }
        }
    }
    result.verdict = Reducibility::Irreducible;
    return result;
}

BallMassProfile ball_mass_profile(const NetworkMedium& medium, const TorusPoint& center, std::vector<double> radii) {
    const PeriodicNetwork& net = medium.network;
    const int n = net.dimension();
    if (center.dimension() != n) throw InvalidArgument("center has wrong dimension");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || !(radii[i] < 0.5)) throw RadiusTooLarge(radii[i]);
        if (i > 0 && !(radii[i] > radii[i - 1])) throw InvalidArgument("radii must be strictly increasing");
    }
    const double factor = medium.mode == Mode::Isotropic ? static_cast<double>(n) : 1.0;
    const Eigen::VectorXd c = center.vec();

    BallMassProfile profile{center, radii, std::vector<double>(radii.size(), 0.0)};
    for (int e : support_edges(net)) {
        const Eigen::VectorXd s = net.node(net.edge(e).u).vec();
        const Eigen::VectorXd d = net.displacement(e);
        const double len2 = d.squaredNorm();
        const double len = std::sqrt(len2);
        const double a = net.edge(e).weight * factor;
        const Eigen::VectorXd lo = s.cwiseMin(s + d);
        const Eigen::VectorXd hi = s.cwiseMax(s + d);
        const double rmax = radii.empty() ? 0.0 : radii.back();

        std::vector<int> from(static_cast<std::size_t>(n)), to(static_cast<std::size_t>(n));
        bool any = true;
        for (int i = 0; i < n; ++i) {
            from[static_cast<std::size_t>(i)] = static_cast<int>(std::ceil(c[i] - rmax - hi[i]));
            to[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(c[i] + rmax - lo[i]));
            if (from[static_cast<std::size_t>(i)] > to[static_cast<std::size_t>(i)]) any = false;
        }
        std::vector<int> t = from;
        while (any) {
            Eigen::VectorXd w = s - c;
            for (int i = 0; i < n; ++i) w[i] += t[static_cast<std::size_t>(i)];
            const double bq = d.dot(w);
            // Squared distance from the center to the line, free of cancellation.
            const double perp2 = (w - (bq / len2) * d).squaredNorm();
            for (std::size_t k = 0; k < radii.size(); ++k) {
                const double disc = len2 * (radii[k] * radii[k] - perp2);
                if (disc <= 0.0) continue;
                const double root = std::sqrt(disc);
                const double t0 = std::max(0.0, (-bq - root) / len2);
                const double t1 = std::min(1.0, (-bq + root) / len2);
                if (t1 > t0) profile.masses[k] += a * len * (t1 - t0);
            }
            int i = 0;
            for (; i < n; ++i) {
                if (++t[static_cast<std::size_t>(i)] <= to[static_cast<std::size_t>(i)]) break;
                t[static_cast<std::size_t>(i)] = from[static_cast<std::size_t>(i)];
            }
            if (i == n) break;
        }
    }
    return profile;
}

MonotonicityResult monotonicity_check(const NetworkMedium& medium, const std::vector<TorusPoint>& centers,
                                      const std::vector<double>& radii, double alpha, int threads) {
    MonotonicityResult result;
    result.profiles.resize(centers.size());
    parallel_for(
        static_cast<int>(centers.size()),
        [&](int i) {
            result.profiles[static_cast<std::size_t>(i)] = ball_mass_profile(medium, centers[static_cast<std::size_t>(i)], radii);
        },
        threads);

    double mass_max = 0.0;
    for (const auto& p : result.profiles)
        for (double m : p.masses) mass_max = std::max(mass_max, m);
    const double slack = 1e-12 * mass_max;

    for (std::size_t c = 0; c < result.profiles.size(); ++c) {
        const auto& p = result.profiles[c];
        for (std::size_t k = 1; k < p.radii.size(); ++k) {
            const double before = p.masses[k - 1] / std::pow(p.radii[k - 1], alpha);
            const double after = p.masses[k] / std::pow(p.radii[k], alpha);
            const double drop = before - after;
            if (drop > result.worst_violation) {
                result.worst_violation = drop;
                result.worst_center = static_cast<int>(c);
            }
        }
    }
    result.pass = result.worst_violation <= slack;
    return result;
}

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t begin, std::size_t end) {
    const double count = static_cast<double>(end - begin);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= count;
    my /= count;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace

LocalDimension estimate_local_dimension(const BallMassProfile& profile) {
    const auto& r = profile.radii;
    const auto& mass = profile.masses;
    if (r.size() < 4 || r.size() != mass.size()) throw DegenerateProfile("need at least 4 radii");
    if (r.back() < 100.0 * r.front()) throw DegenerateProfile("radii must span at least two decades");
    if (!(mass.back() > 0.0)) throw DegenerateProfile("mass vanishes at the largest radius");

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (mass[i] <= 0.0) continue;
        lx.push_back(std::log(r[i]));
        ly.push_back(std::log(mass[i]));
    }
    // Smallest decade above the first radius with positive mass.
    std::size_t region = 0;
    while (region < lx.size() && lx[region] <= lx.front() + std::log(10.0) + 1e-12) ++region;
    region = std::min(lx.size(), std::max<std::size_t>(region, 3));
    if (region < 2) throw DegenerateProfile("too few radii with positive mass");

    LocalDimension dim;
    dim.slope = ls_slope(lx, ly, 0, region);
    dim.lower = dim.upper = dim.slope;
    const double half_decade = 0.5 * std::log(10.0);
    for (std::size_t b = 0; b < region; ++b) {
        for (std::size_t e = b + 2; e <= region; ++e) {
            if (lx[e - 1] - lx[b] < half_decade - 1e-12) continue;
            const double s = ls_slope(lx, ly, b, e);
            dim.lower = std::min(dim.lower, s);
            dim.upper = std::max(dim.upper, s);
            break;  // shortest qualifying window from each start
        }
    }
    return dim;
}

std::vector<TorusPoint> sample_support_points(const PeriodicNetwork& net, int count, std::uint64_t seed) {
    const std::vector<int> edges = support_edges(net);
    if (edges.empty() || count <= 0) return {};
    std::vector<double> cumulative;
    double total = 0.0;
    for (int e : edges) {
        total += net.length(e);
        cumulative.push_back(total);
    }
    Rng rng(seed);
    std::vector<TorusPoint> points;
    for (int i = 0; i < count; ++i) {
        const double pick = rng.uniform() * total;
        const auto k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
        const int e = edges[std::min(k, edges.size() - 1)];
        const Eigen::VectorXd p = net.node(net.edge(e).u).vec() + rng.uniform() * net.displacement(e);
        points.emplace_back(std::vector<double>(p.data(), p.data() + p.size()));
    }
    return points;
}

}  // namespace reticulate
