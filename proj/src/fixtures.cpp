#include "reticulate/fixtures.hpp"

#include <cmath>

#include "reticulate/random.hpp"

namespace reticulate::fixtures {

PeriodicNetwork square_grid(double weight) {
    PeriodicNetwork net(2);
    const int a = net.add_node({0.0, 0.0});
    net.add_edge(a, a, {1, 0}, weight);
    net.add_edge(a, a, {0, 1}, weight);
    return net;
}

PeriodicNetwork honeycomb(double weight) {
    // B sits at the Fermat point of the triangle spanned by A and its translates.
    // A is off the cell corner so that tiled copies cross cell boundaries.
    const double t = (3.0 - std::sqrt(3.0)) / 6.0;
    PeriodicNetwork net(2);
    const int a = net.add_node({0.5, 0.5});
    const int b = net.add_node({0.5 + t, 0.5 + t});
    net.add_edge(a, b, {0, 0}, weight);
    net.add_edge(b, a, {1, 0}, weight);
    net.add_edge(b, a, {0, 1}, weight);
    return net;
}

PeriodicNetwork skewed_honeycomb(double weight) {
    PeriodicNetwork net(2);
    const int a = net.add_node({0.5, 0.5});
    const int b = net.add_node({0.8, 0.6});
    net.add_edge(a, b, {0, 0}, weight);
    net.add_edge(b, a, {1, 0}, weight);
    net.add_edge(b, a, {0, 1}, weight);
    return net;
}

PeriodicNetwork diagonal_loop(double weight) {
    PeriodicNetwork net(2);
    const int a = net.add_node({0.0, 0.0});
    net.add_edge(a, a, {1, 1}, weight);
    return net;
}

PeriodicNetwork open_segment(double weight) {
    PeriodicNetwork net(2);
    const int a = net.add_node({0.2, 0.5});
    const int b = net.add_node({0.6, 0.5});
    net.add_edge(a, b, {0, 0}, weight);
    return net;
}

PeriodicNetwork t_junction(double weight, double stem) {
    if (!(stem > 0.0) || !(stem < 0.5)) throw InvalidArgument("stem length must lie in (0, 1/2)");
    PeriodicNetwork net(2);
    const int n = net.add_node({0.5, 0.5});
    const int d = net.add_node({0.5, 0.5 + stem});
    net.add_edge(n, n, {1, 0}, weight);
    net.add_edge(n, d, {0, 0}, weight);
    return net;
}

PeriodicNetwork diamond_chain(int k) {
    if (k < 1) throw InvalidArgument("diamond chain needs k >= 1");
    const double s = 1.0 / (k * std::sqrt(3.0));
    PeriodicNetwork net(2);
    std::vector<int> chain, top, bottom;
    for (int j = 0; j < k; ++j) chain.push_back(net.add_node({static_cast<double>(j) / k, 0.5}));
    for (int j = 0; j < k; ++j) {
        top.push_back(net.add_node({(j + 0.5) / k, 0.5 + 0.5 * s}));
        bottom.push_back(net.add_node({(j + 0.5) / k, 0.5 - 0.5 * s}));
    }
    for (int j = 0; j < k; ++j) {
        const int next = chain[static_cast<std::size_t>((j + 1) % k)];
        const std::int64_t wrap = (j + 1 == k) ? 1 : 0;
        const auto tj = top[static_cast<std::size_t>(j)];
        const auto bj = bottom[static_cast<std::size_t>(j)];
        net.add_edge(chain[static_cast<std::size_t>(j)], tj, {0, 0});
        net.add_edge(chain[static_cast<std::size_t>(j)], bj, {0, 0});
        net.add_edge(tj, next, {wrap, 0});
        net.add_edge(bj, next, {wrap, 0});
        net.add_edge(tj, bj, {0, 1});
    }
    return net;
}

PeriodicNetwork triangulated_grid(int m) {
    if (m < 2) throw InvalidArgument("triangulated grid needs m >= 2");
    PeriodicNetwork net(2);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) net.add_node({static_cast<double>(i) / m, static_cast<double>(j) / m});
    auto id = [m](int i, int j) { return (j % m) * m + (i % m); };
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const std::int64_t wx = (i + 1 == m) ? 1 : 0;
            const std::int64_t wy = (j + 1 == m) ? 1 : 0;
            net.add_edge(id(i, j), id(i + 1, j), {wx, 0});
            net.add_edge(id(i, j), id(i, j + 1), {0, wy});
            net.add_edge(id(i, j), id(i + 1, j + 1), {wx, wy});
        }
    }
    return net;
}

PeriodicNetwork two_disjoint_loops(double w1, double w2) {
    PeriodicNetwork net(2);
    const int a = net.add_node({0.0, 0.25});
    const int b = net.add_node({0.0, 0.75});
    net.add_edge(a, a, {1, 0}, w1);
    net.add_edge(b, b, {1, 0}, w2);
    return net;
}

PeriodicNetwork gap_segment(double delta, double weight) {
    if (!(delta >= 0.0) || !(delta < 1.0)) throw InvalidArgument("gap must lie in [0, 1)");
    PeriodicNetwork net(2);
    if (delta == 0.0) {
        const int a = net.add_node({0.0, 0.5});
        net.add_edge(a, a, {1, 0}, weight);
        return net;
    }
    const int a = net.add_node({0.5 * delta, 0.5});
    const int b = net.add_node({1.0 - 0.5 * delta, 0.5});
    net.add_edge(a, b, {0, 0}, weight);
    return net;
}

std::vector<std::string> names() {
    return {"square_grid", "honeycomb", "skewed_honeycomb", "diagonal_loop", "open_segment", "t_junction",
            "diamond_chain", "triangulated_grid", "two_disjoint_loops", "gap_segment"};
}

std::optional<PeriodicNetwork> by_name(const std::string& name) {
    if (name == "square_grid") return square_grid();
    if (name == "honeycomb") return honeycomb();
    if (name == "skewed_honeycomb") return skewed_honeycomb();
    if (name == "diagonal_loop") return diagonal_loop();
    if (name == "open_segment") return open_segment();
    if (name == "t_junction") return t_junction();
    if (name == "diamond_chain") return diamond_chain(7);
    if (name == "triangulated_grid") return triangulated_grid(8);
    if (name == "two_disjoint_loops") return two_disjoint_loops();
    if (name == "gap_segment") return gap_segment(0.1);
    return std::nullopt;
}

PeriodicNetwork random_network(std::uint64_t seed, int min_nodes, int max_nodes, int min_edges, int max_edges,
                               double w_lo, double w_hi) {
    Rng rng(seed);
    const int nodes = min_nodes + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_nodes - min_nodes + 1)));
    const int edges = min_edges + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_edges - min_edges + 1)));
    PeriodicNetwork net(2);
    for (int i = 0; i < nodes; ++i) net.add_node({rng.uniform(), rng.uniform()});
    while (net.edge_count() < edges) {
        const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(nodes)));
        const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(nodes)));
        // Mostly local edges; a few wrap the torus.
        IntVec z{0, 0};
        if (rng.uniform() < 0.3) {
            z[0] = static_cast<std::int64_t>(rng.below(3)) - 1;
            z[1] = static_cast<std::int64_t>(rng.below(3)) - 1;
        }
        if (u == v && z[0] == 0 && z[1] == 0) continue;
        net.add_edge(u, v, z, rng.uniform(w_lo, w_hi));
    }
    return net;
}

PeriodicNetwork random_geodesic_union(std::uint64_t seed) {
    static const std::int64_t classes[][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {1, 2}, {2, 1}};
    Rng rng(seed);
    PeriodicNetwork net(2);
    const int lines = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < lines; ++i) {
        const auto& c = classes[rng.below(6)];
        const int a = net.add_node({rng.uniform(), rng.uniform()});
        net.add_edge(a, a, {c[0], c[1]});
    }
    if (rng.uniform() < 0.5) {
        const double t = (3.0 - std::sqrt(3.0)) / 6.0;
        const double ox = rng.uniform();
        const double oy = rng.uniform();
        const int a = net.add_node({ox, oy});
        const int b = net.add_node({ox + t, oy + t});
        // Crossing vectors follow the wrapped representatives.
        const auto fa = [&](double x) { return static_cast<std::int64_t>(std::floor(x)); };
        const std::int64_t zx = fa(ox + t), zy = fa(oy + t);
        net.add_edge(a, b, {zx, zy});
        net.add_edge(b, a, {1 - zx, -zy});
        net.add_edge(b, a, {-zx, 1 - zy});
    }
    return net;
}

}  // namespace reticulate::fixtures
