#include <doctest.h>

#include <cmath>

#include "reticulate/adaptation.hpp"
#include "reticulate/fixtures.hpp"
#include "reticulate/random.hpp"
#include "reticulate/topology.hpp"

using namespace reticulate;

namespace {

PeriodicNetwork single_edge(double a) {
    PeriodicNetwork net(2);
    const int u = net.add_node({0.1, 0.1});
    const int v = net.add_node({0.6, 0.1});
    net.add_edge(u, v, {0, 0}, a);
    return net;
}

double total_mass(const PeriodicNetwork& net) {
    double m = 0.0;
    for (int e = 0; e < net.edge_count(); ++e) m += net.edge(e).weight * net.length(e);
    return m;
}

// Largest connected random network among a few seeds, with its node 0 as source.
PeriodicNetwork connected_random(std::uint64_t seed) {
    for (std::uint64_t s = seed;; s += 1000) {
        PeriodicNetwork net = planarize(fixtures::random_network(s, 6, 12, 12, 20));
        if (components(net).size() == 1 && net.node_count() >= 6) {
            bool isolated = false;
            for (int v = 0; v < net.node_count(); ++v) {
                bool touched = false;
                for (const Edge& e : net.edges()) touched = touched || e.u == v || e.v == v;
                isolated = isolated || !touched;
            }
            if (!isolated) return net;
        }
    }
}

}  // namespace

TEST_SUITE("adaptation") {

TEST_CASE("Darcy solve") {
    const PeriodicNetwork grid = fixtures::triangulated_grid(4);
    CHECK(darcy_solve(grid, Eigen::VectorXd::Zero(16)).norm() == 0.0);

    const double a = 2.0;
    const PeriodicNetwork edge = single_edge(a);
    const double c = a / edge.length(0);
    const Eigen::VectorXd phi = darcy_solve(edge, Eigen::Vector2d(1.0, -1.0));
    CHECK(phi[0] - phi[1] == doctest::Approx(1.0 / c));
    CHECK(phi[0] + phi[1] == doctest::Approx(0.0));

    CHECK_THROWS_AS(darcy_solve(edge, Eigen::Vector2d(1.0, 0.0)), UnbalancedInjection);
    const PeriodicNetwork loops = fixtures::two_disjoint_loops();
    CHECK_THROWS_AS(darcy_solve(loops, Eigen::Vector2d(1.0, -1.0)), UnbalancedInjection);
    CHECK_THROWS_AS(darcy_solve(edge, Eigen::Vector3d(1.0, -1.0, 0.0)), InvalidArgument);
}

TEST_CASE("dissipation equals the injected work") {
    const PeriodicNetwork net = connected_random(1);
    FluctuationModel model;
    model.patch_count = 3;
    std::vector<Eigen::VectorXd> inj;
    for (std::uint64_t r = 0; r < 5; ++r) inj.push_back(draw_injection(net, model, r));
    const DissipationGradient g = dissipation_gradient(net, inj);
    double work = 0.0;
    for (const Eigen::VectorXd& m : inj) work += m.dot(darcy_solve(net, m));
    work /= static_cast<double>(inj.size());
    CHECK(g.dissipation == doctest::Approx(work).epsilon(1e-9));
    for (const Eigen::VectorXd& m : inj) CHECK(std::abs(m.sum()) <= 1e-12);
}

TEST_CASE("injection patterns") {
    const PeriodicNetwork net = fixtures::triangulated_grid(4);
    FluctuationModel model;
    model.source_node = 5;
    model.patch_count = 4;
    model.patch_strength = 0.5;
    const Eigen::VectorXd m = draw_injection(net, model, 99);
    CHECK(m[5] == doctest::Approx(2.0));
    int sinks = 0;
    for (int i = 0; i < 16; ++i)
        if (m[i] < 0.0) {
            CHECK(m[i] == doctest::Approx(-0.5));
            ++sinks;
        }
    CHECK(sinks == 4);
    CHECK(draw_injection(net, model, 99) == m);

    model.kind = FluctuationModel::Kind::FixedSink;
    model.sink_node = 0;
    const Eigen::VectorXd f = draw_injection(net, model, 1);
    CHECK(f[0] == doctest::Approx(-2.0));
    model.sink_node = 5;
    CHECK_THROWS_AS(draw_injection(net, model, 1), InvalidArgument);
    model.kind = FluctuationModel::Kind::Random;
    model.patch_count = 16;
    CHECK_THROWS_AS(draw_injection(net, model, 1), InvalidArgument);
}

TEST_CASE("zero step size leaves the trace constant") {
    FluctuationModel model;
    model.patch_count = 2;
    AdaptOptions opts;
    opts.steps = 5;
    opts.samples_per_step = 4;
    opts.dt = 0.0;
    const AdaptationTrace trace = adapt({fixtures::triangulated_grid(4), Mode::Tangential}, model, opts);
    REQUIRE(trace.steps.size() == 6);
    for (const AdaptationStep& s : trace.steps) {
        CHECK(s.weights == trace.steps.front().weights);
        CHECK(s.Q == trace.steps.front().Q);
    }
}

TEST_CASE("a single edge keeps its weight") {
    FluctuationModel model;
    AdaptOptions opts;
    opts.steps = 4;
    opts.samples_per_step = 3;
    opts.dt = 0.5;
    const AdaptationTrace trace = adapt({single_edge(0.7), Mode::Tangential}, model, opts);
    for (const AdaptationStep& s : trace.steps) CHECK(s.weights[0] == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("mass conservation, stride and determinism across thread counts") {
    FluctuationModel model;
    model.patch_count = 4;
    model.seed = 1234;
    AdaptOptions opts;
    opts.steps = 12;
    opts.samples_per_step = 6;
    opts.dt = 0.05;
    opts.trace_stride = 5;
    const NetworkMedium m{fixtures::triangulated_grid(4), Mode::Tangential};
    const double m0 = total_mass(m.network);

    opts.threads = 1;
    const AdaptationTrace one = adapt(m, model, opts);
    REQUIRE(one.steps.size() == 4);
    CHECK(one.steps[1].t == 5);
    CHECK(one.steps.back().t == 12);
    for (const AdaptationStep& s : one.steps) CHECK(std::abs(s.total_mass - m0) <= 1e-9);

    for (int threads : {2, 8}) {
        opts.threads = threads;
        const AdaptationTrace other = adapt(m, model, opts);
        REQUIRE(other.steps.size() == one.steps.size());
        for (std::size_t i = 0; i < one.steps.size(); ++i) {
            CHECK(other.steps[i].weights == one.steps[i].weights);
            CHECK(other.steps[i].dissipation == one.steps[i].dissipation);
        }
    }
}

TEST_CASE("small renormalized steps lower the dissipation") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const PeriodicNetwork net = connected_random(seed * 7 + 3);
        FluctuationModel model;
        model.patch_count = 2;
        std::vector<Eigen::VectorXd> inj;
        for (std::uint64_t r = 0; r < 8; ++r) inj.push_back(draw_injection(net, model, derive_seed(seed, 0, r)));
        const DissipationGradient g = dissipation_gradient(net, inj);
        const double dt = 0.5 * stability_threshold(net, g.gradient);
        REQUIRE(dt > 0.0);
        PeriodicNetwork stepped = net;
        const std::vector<double> w = adaptation_step(net, g.gradient, dt);
        for (int e = 0; e < net.edge_count(); ++e) stepped.set_weight(e, w[static_cast<std::size_t>(e)]);
        CHECK(dissipation_gradient(stepped, inj).dissipation < g.dissipation);
        ++checked;
    }
    CHECK(checked == 10);
}

TEST_CASE("weights are floored") {
    PeriodicNetwork net = fixtures::triangulated_grid(3);
    net.set_weight(0, 1.5e-14);
    const std::vector<double> g(static_cast<std::size_t>(net.edge_count()), 1.0);
    std::vector<int> clamped;
    const std::vector<double> w = adaptation_step(net, std::vector<double>(g.size(), 0.0), 0.0, &clamped);
    CHECK(clamped.empty());
    std::vector<double> big = g;
    big[0] = 0.0;
    const std::vector<double> w2 = adaptation_step(net, big, 10.0, &clamped);
    REQUIRE(clamped.size() == 1);
    CHECK(clamped[0] == 0);
    CHECK(w2[0] == kWeightFloor);
    CHECK(w[0] == 1.5e-14);
}

TEST_CASE("argument checks") {
    FluctuationModel model;
    AdaptOptions opts;
    opts.dt = -1.0;
    CHECK_THROWS_AS(adapt({fixtures::triangulated_grid(3), Mode::Tangential}, model, opts), InvalidArgument);
    PeriodicNetwork zero = fixtures::triangulated_grid(3);
    zero.set_weight(2, 0.0);
    opts.dt = 0.1;
    CHECK_THROWS_AS(adapt({zero, Mode::Tangential}, model, opts), InvalidArgument);
}

}  // TEST_SUITE
