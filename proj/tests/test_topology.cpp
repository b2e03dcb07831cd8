#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "reticulate/core.hpp"
#include "reticulate/fixtures.hpp"
#include "reticulate/topology.hpp"

using namespace reticulate;

namespace {

// Index of a full-rank 2D lattice: gcd of all 2x2 minors of the generators.
std::int64_t lattice_index(const std::vector<IntVec>& rows) {
    std::int64_t g = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j)
            g = std::gcd(g, std::llabs(rows[i][0] * rows[j][1] - rows[i][1] * rows[j][0]));
    return g;
}

double total_length(const PeriodicNetwork& net) {
    double s = 0.0;
    for (int e = 0; e < net.edge_count(); ++e)
        if (net.in_support(e)) s += net.length(e);
    return s;
}

double weighted_length(const PeriodicNetwork& net) {
    double s = 0.0;
    for (int e = 0; e < net.edge_count(); ++e)
        if (net.in_support(e)) s += net.edge(e).weight * net.length(e);
    return s;
}

PeriodicNetwork crossing_loops() {
    PeriodicNetwork net(2);
    const int a = net.add_node({0.0, 0.5});
    const int b = net.add_node({0.5, 0.0});
    net.add_edge(a, a, {1, 0});
    net.add_edge(b, b, {0, 1});
    return net;
}

}  // namespace

TEST_SUITE("topology") {

TEST_CASE("Hermite normal form spans the same lattice") {
    const std::vector<IntVec> gens{{2, 0}, {0, 2}, {1, 1}};
    const auto hnf = hermite_normal_form(gens, 2);
    REQUIRE(hnf.size() == 2);
    CHECK(std::llabs(hnf[0][0] * hnf[1][1] - hnf[0][1] * hnf[1][0]) == lattice_index(gens));
    CHECK(lattice_index(gens) == 2);
    CHECK(make_lattice(2, {{2, 4}, {1, 2}}).rank == 1);
    CHECK(make_lattice(2, {}).rank == 0);
}

TEST_CASE("orthogonal complement") {
    const Eigen::MatrixXd c = orthogonal_complement({{1, 1}}, 2);
    REQUIRE(c.cols() == 1);
    CHECK(std::abs(c(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(c(0, 0) * c(1, 0) < 0.0);
    CHECK(orthogonal_complement({}, 3).cols() == 3);
    CHECK(orthogonal_complement({{1, 0}, {0, 1}}, 2).cols() == 0);
}

TEST_CASE("classification of the canonical fixtures") {
    const Classification trivial = classify(fixtures::open_segment());
    CHECK(trivial.kind == LatticeKind::Trivial);
    CHECK(trivial.predicted_kernel.cols() == 2);

    const Classification diag = classify(fixtures::diagonal_loop());
    CHECK(diag.kind == LatticeKind::QuasiLaminate);
    CHECK(diag.direction == IntVec{1, 1});

    const Classification grid = classify(fixtures::square_grid());
    CHECK(grid.kind == LatticeKind::Loopy);
    CHECK(grid.reticulate);
    CHECK(grid.predicted_kernel.cols() == 0);

    CHECK(classify(fixtures::honeycomb()).reticulate);
    CHECK(classify(fixtures::diamond_chain(7)).reticulate);
    const Classification loops = classify(fixtures::two_disjoint_loops());
    CHECK(loops.kind == LatticeKind::QuasiLaminate);
    CHECK(loops.direction == IntVec{1, 0});
    CHECK(loops.per_component.size() == 2);
}

TEST_CASE("crossing loops are joined by planarization") {
    const PeriodicNetwork raw = crossing_loops();
    const Classification before = classify(raw);
    CHECK(before.kind == LatticeKind::Loopy);
    CHECK_FALSE(before.reticulate);

    const PeriodicNetwork planar = planarize(raw);
    CHECK(planar.node_count() == 3);
    CHECK(planar.edge_count() == 4);
    CHECK(components(planar).size() == 1);
    CHECK(classify(planar).reticulate);
    CHECK(total_length(planar) == doctest::Approx(2.0));
}

TEST_CASE("planarization splits at T-junctions and merges overlaps") {
    // A stem ending on the interior of a horizontal loop.
    PeriodicNetwork t(2);
    const int a = t.add_node({0.0, 0.5});
    const int b = t.add_node({0.3, 0.5});
    const int c = t.add_node({0.3, 0.8});
    t.add_edge(a, a, {1, 0});
    t.add_edge(b, c, {0, 0});
    const PeriodicNetwork pt = planarize(t);
    CHECK(components(pt).size() == 1);
    CHECK(pt.edge_count() == 3);

    // Two copies of the same segment collapse into one with summed weight.
    PeriodicNetwork o(2);
    const int u = o.add_node({0.1, 0.1});
    const int v = o.add_node({0.4, 0.1});
    o.add_edge(u, v, {0, 0}, 1.0);
    o.add_edge(v, u, {0, 0}, 2.0);
    const PeriodicNetwork po = planarize(o);
    REQUIRE(po.edge_count() == 1);
    CHECK(po.edge(0).weight == doctest::Approx(3.0));
}

TEST_CASE("planarization preserves length and mass and is idempotent") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const PeriodicNetwork raw = fixtures::random_network(seed);
        const PeriodicNetwork once = planarize(raw);
        // Overlapping pieces merge, so the support can only shrink while Σ aℓ is kept.
        CHECK(weighted_length(once) == doctest::Approx(weighted_length(raw)).epsilon(1e-9));
        CHECK(total_length(once) <= total_length(raw) * (1.0 + 1e-12));
        const SymMatrix dm = mass_tensor({once, Mode::Tangential}) - mass_tensor({raw, Mode::Tangential});
        CHECK(dm.frobenius() <= 1e-9 * (1.0 + mass_tensor({raw, Mode::Tangential}).frobenius()));
        const PeriodicNetwork twice = planarize(once);
        CHECK(twice.node_count() == once.node_count());
        CHECK(twice.edge_count() == once.edge_count());
    }
}

TEST_CASE("planarization drops edges below the support threshold") {
    PeriodicNetwork net = fixtures::square_grid();
    net.set_weight(1, 1e-13);
    const PeriodicNetwork p = planarize(net);
    CHECK(p.edge_count() == 1);
    CHECK(classify(p).kind == LatticeKind::QuasiLaminate);
}

TEST_CASE("planarization needs n = 2") {
    PeriodicNetwork net(3);
    const int a = net.add_node({0.0, 0.0, 0.0});
    net.add_edge(a, a, {1, 0, 0});
    CHECK_THROWS_AS(planarize(net), DimensionUnsupported);
}

TEST_CASE("cycle lattice of larger fixtures") {
    CHECK(cycle_lattice(fixtures::triangulated_grid(8)).rank == 2);
    CHECK(lattice_index(cycle_lattice(fixtures::triangulated_grid(4)).basis) == 1);
    CHECK(cycle_lattice(fixtures::open_segment()).rank == 0);
    CHECK(cycle_lattice(fixtures::gap_segment(0.0)).rank == 1);
    CHECK(cycle_lattice(fixtures::gap_segment(0.1)).rank == 0);
}

TEST_CASE("three-dimensional intermediate lattices") {
    PeriodicNetwork net(3);
    const int a = net.add_node({0.0, 0.0, 0.0});
    net.add_edge(a, a, {1, 0, 0});
    net.add_edge(a, a, {0, 1, 0});
    const Classification c = classify(net);
    CHECK(c.kind == LatticeKind::Intermediate);
    CHECK(c.predicted_kernel.cols() == 1);
}

TEST_CASE("subnetworks and components") {
    const PeriodicNetwork loops = fixtures::two_disjoint_loops();
    const auto comps = components(loops);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].edge(0).weight == 1.0);
    CHECK(comps[1].edge(0).weight == 2.0);
    const PeriodicNetwork sub = subnetwork(fixtures::honeycomb(), {1});
    CHECK(sub.edge_count() == 1);
    CHECK(sub.node_count() == 2);
}

}  // TEST_SUITE
