#include "reticulate/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <queue>

namespace reticulate {

namespace {

std::int64_t checked_sub_mul(std::int64_t a, std::int64_t q, std::int64_t b) {
    std::int64_t prod = 0;
    std::int64_t out = 0;
    if (__builtin_mul_overflow(q, b, &prod) || __builtin_sub_overflow(a, prod, &out))
        throw Error("integer overflow in Hermite normal form");
    return out;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

void row_sub(IntVec& target, std::int64_t q, const IntVec& source) {
    for (std::size_t i = 0; i < target.size(); ++i) target[i] = checked_sub_mul(target[i], q, source[i]);
}

class DisjointSets {
public:
    explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            parent_[static_cast<std::size_t>(x)] =
                parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
            x = parent_[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
    }

private:
    std::vector<int> parent_;
};

}  // namespace

std::vector<IntVec> hermite_normal_form(std::vector<IntVec> rows, int n) {
    std::erase_if(rows, [](const IntVec& r) {
        return std::all_of(r.begin(), r.end(), [](std::int64_t x) { return x == 0; });
    });
    std::size_t pivot_row = 0;
    for (int col = 0; col < n && pivot_row < rows.size(); ++col) {
        const auto c = static_cast<std::size_t>(col);
        // Euclid on the column below pivot_row until a single nonzero remains.
        while (true) {
            std::size_t best = rows.size();
            for (std::size_t i = pivot_row; i < rows.size(); ++i) {
                if (rows[i][c] == 0) continue;
                if (best == rows.size() || std::llabs(rows[i][c]) < std::llabs(rows[best][c])) best = i;
            }
            if (best == rows.size()) break;
            std::swap(rows[pivot_row], rows[best]);
            bool done = true;
            for (std::size_t i = pivot_row + 1; i < rows.size(); ++i) {
                if (rows[i][c] == 0) continue;
                row_sub(rows[i], floor_div(rows[i][c], rows[pivot_row][c]), rows[pivot_row]);
                if (rows[i][c] != 0) done = false;
            }
            if (done) break;
        }
        if (rows[pivot_row][c] == 0) continue;
        if (rows[pivot_row][c] < 0)
            for (auto& x : rows[pivot_row]) x = -x;
        for (std::size_t i = 0; i < pivot_row; ++i)
            row_sub(rows[i], floor_div(rows[i][c], rows[pivot_row][c]), rows[pivot_row]);
        ++pivot_row;
    }
    rows.resize(pivot_row);
    return rows;
}

CycleLattice make_lattice(int n, std::vector<IntVec> generators) {
    CycleLattice lattice;
    lattice.dimension = n;
    lattice.basis = hermite_normal_form(generators, n);
    lattice.rank = static_cast<int>(lattice.basis.size());
    lattice.generators = std::move(generators);
    return lattice;
}

Eigen::MatrixXd orthogonal_complement(const std::vector<IntVec>& rows, int n) {
    std::vector<Eigen::VectorXd> span;
    auto project_out = [](Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis) {
        // Two passes of modified Gram-Schmidt.
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) v -= b.dot(v) * b;
    };
    for (const IntVec& r : rows) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = static_cast<double>(r[static_cast<std::size_t>(i)]);
        const double scale = v.norm();
        if (scale == 0.0) continue;
        project_out(v, span);
        if (v.norm() > 1e-9 * scale) span.push_back(v.normalized());
    }
    std::vector<Eigen::VectorXd> complement;
    const std::size_t want = static_cast<std::size_t>(n) - span.size();
    for (int i = 0; i < n && complement.size() < want; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(n, i);
        project_out(v, span);
        project_out(v, complement);
        if (v.norm() > 1e-6) complement.push_back(v.normalized());
    }
    Eigen::MatrixXd out(n, static_cast<Eigen::Index>(complement.size()));
    for (std::size_t c = 0; c < complement.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = complement[c];
    canonicalize_signs(out);
    return out;
}

std::string_view to_string(LatticeKind kind) {
    switch (kind) {
        case LatticeKind::Trivial: return "Trivial";
        case LatticeKind::QuasiLaminate: return "QuasiLaminate";
        case LatticeKind::Loopy: return "Loopy";
        case LatticeKind::Intermediate: return "Intermediate";
    }
    return "?";
}

// --- planarize ---------------------------------------------------------------

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

struct Segment {
    Eigen::Vector2d start;
    Eigen::Vector2d dir;
    double length = 0.0;
    Eigen::Vector2d lo, hi;
    int u = 0, v = 0;
    double weight = 0.0;
};

// Integer translates s with (box_b + s) meeting box_a (each enlarged by eps).
std::pair<Eigen::Vector2i, Eigen::Vector2i> shift_range(const Eigen::Vector2d& lo_a, const Eigen::Vector2d& hi_a,
                                                      const Eigen::Vector2d& lo_b, const Eigen::Vector2d& hi_b,
                                                      double eps) {
    Eigen::Vector2i from, to;
    for (int i = 0; i < 2; ++i) {
        from[i] = static_cast<int>(std::ceil(lo_a[i] - hi_b[i] - eps));
        to[i] = static_cast<int>(std::floor(hi_a[i] - lo_b[i] + eps));
    }
    return {from, to};
}

double torus_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    Eigen::Vector2d d = a - b;
    for (int i = 0; i < 2; ++i) d[i] -= std::round(d[i]);
    return d.norm();
}

bool lex_less(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
}

}  // namespace

PeriodicNetwork planarize(const PeriodicNetwork& net, double eps) {
    if (net.dimension() != 2) throw DimensionUnsupported(net.dimension());
    net.validate();

    std::vector<Segment> segs;
    for (int e = 0; e < net.edge_count(); ++e) {
        if (!net.in_support(e)) continue;
        Segment s;
        s.start = net.node(net.edge(e).u).vec();
        s.dir = net.displacement(e);
        s.length = s.dir.norm();
        s.lo = s.start.cwiseMin(s.start + s.dir);
        s.hi = s.start.cwiseMax(s.start + s.dir);
        s.u = net.edge(e).u;
        s.v = net.edge(e).v;
        s.weight = net.edge(e).weight;
        segs.push_back(s);
    }

    std::vector<std::vector<double>> splits(segs.size());
    auto add_split = [&](std::size_t i, double t) {
        const double tol = eps / segs[i].length;
        if (t > tol && t < 1.0 - tol) splits[i].push_back(t);
    };

    // Transversal crossings between every pair of lifted edges (including an
    // edge and its own translates).
    for (std::size_t i = 0; i < segs.size(); ++i) {
        for (std::size_t j = i; j < segs.size(); ++j) {
            const Segment& a = segs[i];
            const Segment& b = segs[j];
            const double denom = cross2(a.dir, b.dir);
            if (std::abs(denom) <= eps * a.length * b.length) continue;
            auto [from, to] = shift_range(a.lo, a.hi, b.lo, b.hi, eps);
            for (int sx = from.x(); sx <= to.x(); ++sx) {
                for (int sy = from.y(); sy <= to.y(); ++sy) {
                    if (i == j && sx == 0 && sy == 0) continue;
                    const Eigen::Vector2d q = b.start + Eigen::Vector2d(sx, sy);
                    const Eigen::Vector2d w = q - a.start;
                    const double t = cross2(w, b.dir) / denom;
                    const double u = cross2(w, a.dir) / denom;
                    const double ta = eps / a.length;
                    const double tb = eps / b.length;
                    if (t < -ta || t > 1.0 + ta || u < -tb || u > 1.0 + tb) continue;
                    add_split(i, t);
                    add_split(j, u);
                }
            }
        }
    }

    // Nodes lying on edge interiors: T-junctions and the ends of collinear overlaps.
    for (int p = 0; p < net.node_count(); ++p) {
        const Eigen::Vector2d x = net.node(p).vec();
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const Segment& a = segs[i];
            auto [from, to] = shift_range(a.lo, a.hi, x, x, eps);
            for (int sx = from.x(); sx <= to.x(); ++sx) {
                for (int sy = from.y(); sy <= to.y(); ++sy) {
                    const Eigen::Vector2d w = x + Eigen::Vector2d(sx, sy) - a.start;
                    const double t = w.dot(a.dir) / (a.length * a.length);
                    if (std::abs(cross2(a.dir, w)) / a.length > eps) continue;
                    add_split(i, t);
                }
            }
        }
    }

    // Point pool: original nodes first, then split points.
    struct Point {
        Eigen::Vector2d pos;
        bool original;
    };
    std::vector<Point> points;
    for (int p = 0; p < net.node_count(); ++p) points.push_back({net.node(p).vec(), true});

    struct Piece {
        std::size_t seg;
        double t0, t1;
        int p0, p1;
    };
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        auto& ts = splits[i];
        std::sort(ts.begin(), ts.end());
        std::vector<double> cuts{0.0};
        const double tol = eps / segs[i].length;
        for (double t : ts)
            if (t - cuts.back() > tol) cuts.push_back(t);
        if (1.0 - cuts.back() <= tol && cuts.size() > 1) cuts.pop_back();
        cuts.push_back(1.0);

        std::vector<int> ids;
        ids.push_back(segs[i].u);
        for (std::size_t c = 1; c + 1 < cuts.size(); ++c) {
            Eigen::Vector2d pos = segs[i].start + cuts[c] * segs[i].dir;
            pos = Eigen::Vector2d(wrap_unit(pos.x()), wrap_unit(pos.y()));
            points.push_back({pos, false});
            ids.push_back(static_cast<int>(points.size()) - 1);
        }
        ids.push_back(segs[i].v);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) pieces.push_back({i, cuts[c], cuts[c + 1], ids[c], ids[c + 1]});
    }

    // Merge points closer than eps on the torus.
    DisjointSets clusters(static_cast<int>(points.size()));
    for (std::size_t a = 0; a < points.size(); ++a)
        for (std::size_t b = a + 1; b < points.size(); ++b)
            if (torus_distance(points[a].pos, points[b].pos) < eps)
                clusters.unite(static_cast<int>(a), static_cast<int>(b));

    // Representative of a cluster: lexicographically smallest original node if
    // any, else the smallest split point.
    std::map<int, int> rep_of_root;
    for (std::size_t a = 0; a < points.size(); ++a) {
        const int root = clusters.find(static_cast<int>(a));
        auto it = rep_of_root.find(root);
        if (it == rep_of_root.end()) {
            rep_of_root[root] = static_cast<int>(a);
            continue;
        }
        const Point& cur = points[static_cast<std::size_t>(it->second)];
        const Point& cand = points[a];
        if ((cand.original && !cur.original) ||
            (cand.original == cur.original && lex_less(cand.pos, cur.pos)))
            it->second = static_cast<int>(a);
    }
    std::vector<int> reps;
    for (auto& [root, rep] : rep_of_root) reps.push_back(rep);
    std::sort(reps.begin(), reps.end(), [&](int a, int b) {
        const auto& pa = points[static_cast<std::size_t>(a)].pos;
        const auto& pb = points[static_cast<std::size_t>(b)].pos;
        if (lex_less(pa, pb)) return true;
        if (lex_less(pb, pa)) return false;
        return a < b;
    });
    std::map<int, int> node_of_root;
    PeriodicNetwork out(2);
    for (int rep : reps) {
        const auto& pos = points[static_cast<std::size_t>(rep)].pos;
        node_of_root[clusters.find(rep)] = out.add_node({pos.x(), pos.y()});
    }

    // Canonical orientation: u < v, or u == v with lexicographically positive shift.
    std::map<std::tuple<int, int, std::int64_t, std::int64_t>, double> merged;
    for (const Piece& pc : pieces) {
        const Segment& s = segs[pc.seg];
        int a = node_of_root[clusters.find(pc.p0)];
        int b = node_of_root[clusters.find(pc.p1)];
        const Eigen::Vector2d delta = (pc.t1 - pc.t0) * s.dir;
        const Eigen::Vector2d za = out.node(a).vec() + delta - out.node(b).vec();
        std::int64_t zx = std::llround(za.x());
        std::int64_t zy = std::llround(za.y());
        if (a == b && zx == 0 && zy == 0) continue;
        if (a > b || (a == b && (zx < 0 || (zx == 0 && zy < 0)))) {
            std::swap(a, b);
            zx = -zx;
            zy = -zy;
        }
        merged[{a, b, zx, zy}] += s.weight;
    }
    for (const auto& [key, w] : merged) {
        auto [a, b, zx, zy] = key;
        out.add_edge(a, b, {zx, zy}, w);
    }
    return out;
}

// --- components --------------------------------------------------------------

std::vector<std::vector<int>> component_edges(const PeriodicNetwork& net) {
    DisjointSets sets(net.node_count());
    for (int e = 0; e < net.edge_count(); ++e)
        if (net.in_support(e)) sets.unite(net.edge(e).u, net.edge(e).v);
    std::map<int, std::size_t> slot;
    std::vector<std::vector<int>> groups;
    for (int e = 0; e < net.edge_count(); ++e) {
        if (!net.in_support(e)) continue;
        const int root = sets.find(net.edge(e).u);
        auto [it, inserted] = slot.try_emplace(root, groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(e);
    }
    return groups;
}

PeriodicNetwork subnetwork(const PeriodicNetwork& net, const std::vector<int>& edge_ids) {
    std::vector<int> used;
    for (int e : edge_ids) {
        used.push_back(net.edge(e).u);
        used.push_back(net.edge(e).v);
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::map<int, int> remap;
    PeriodicNetwork sub(net.dimension());
    for (int node : used) remap[node] = sub.add_node(net.node(node));
    for (int e : edge_ids) {
        const Edge& ed = net.edge(e);
        sub.add_edge(remap[ed.u], remap[ed.v], ed.shift, ed.weight);
    }
    return sub;
}

std::vector<PeriodicNetwork> components(const PeriodicNetwork& net) {
    std::vector<PeriodicNetwork> out;
    for (const auto& group : component_edges(net)) out.push_back(subnetwork(net, group));
    return out;
}

// --- cycle lattice -----------------------------------------------------------

namespace {

std::vector<IntVec> component_generators(const PeriodicNetwork& net, const std::vector<int>& edge_ids) {
    const int n = net.dimension();
    struct Incidence {
        int edge;
        int other;
        bool forward;
    };
    std::map<int, std::vector<Incidence>> adjacency;
    for (int e : edge_ids) {
        const Edge& ed = net.edge(e);
        adjacency[ed.u].push_back({e, ed.v, true});
        if (ed.u != ed.v) adjacency[ed.v].push_back({e, ed.u, false});
    }
    // Integer lift offset of each node relative to the root.
    std::map<int, IntVec> offset;
    std::vector<bool> tree_edge(static_cast<std::size_t>(net.edge_count()), false);
    const int root = adjacency.begin()->first;
    offset[root] = IntVec(static_cast<std::size_t>(n), 0);
    std::queue<int> frontier;
    frontier.push(root);
    while (!frontier.empty()) {
        const int x = frontier.front();
        frontier.pop();
        for (const Incidence& inc : adjacency[x]) {
            if (offset.contains(inc.other)) continue;
            const IntVec& z = net.edge(inc.edge).shift;
            IntVec o = offset[x];
            for (int i = 0; i < n; ++i) o[static_cast<std::size_t>(i)] += inc.forward ? z[static_cast<std::size_t>(i)] : -z[static_cast<std::size_t>(i)];
            offset[inc.other] = std::move(o);
            tree_edge[static_cast<std::size_t>(inc.edge)] = true;
            frontier.push(inc.other);
        }
    }
    std::vector<IntVec> gens;
    for (int e : edge_ids) {
        if (tree_edge[static_cast<std::size_t>(e)]) continue;
        const Edge& ed = net.edge(e);
        IntVec g(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = offset[ed.u][i] + ed.shift[i] - offset[ed.v][i];
        gens.push_back(std::move(g));
    }
    return gens;
}

}  // namespace

CycleLattice cycle_lattice(const PeriodicNetwork& net) {
    std::vector<IntVec> gens;
    for (const auto& group : component_edges(net)) {
        auto g = component_generators(net, group);
        gens.insert(gens.end(), g.begin(), g.end());
    }
    return make_lattice(net.dimension(), std::move(gens));
}

Classification classify(const PeriodicNetwork& net) {
    const int n = net.dimension();
    Classification c;
    std::vector<IntVec> all;
    const auto groups = component_edges(net);
    for (std::size_t k = 0; k < groups.size(); ++k) {
        CycleLattice lat = make_lattice(n, component_generators(net, groups[k]));
        if (lat.rank == n) c.reticulate = true;
        all.insert(all.end(), lat.generators.begin(), lat.generators.end());
        c.per_component.push_back({static_cast<int>(k), std::move(lat)});
    }
    c.total = make_lattice(n, std::move(all));
    if (c.total.rank == 0) {
        c.kind = LatticeKind::Trivial;
    } else if (c.total.rank == n) {
        c.kind = LatticeKind::Loopy;
    } else if (c.total.rank == 1) {
        c.kind = LatticeKind::QuasiLaminate;
        c.direction = c.total.basis.front();
        std::int64_t g = 0;
        for (auto x : c.direction) g = std::gcd(g, x);
        for (auto& x : c.direction) x /= g;
    } else {
        c.kind = LatticeKind::Intermediate;
    }
    c.predicted_kernel = orthogonal_complement(c.total.basis, n);
    return c;
}

}  // namespace reticulate
