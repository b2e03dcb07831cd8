#include <doctest.h>

#include <cmath>
#include <numbers>

#include "reticulate/core.hpp"
#include "reticulate/fixtures.hpp"
#include "reticulate/random.hpp"

using namespace reticulate;

namespace {

SymMatrix diag(std::initializer_list<double> d) {
    SymMatrix m(static_cast<int>(d.size()));
    int i = 0;
    for (double x : d) m.set(i, i, x), ++i;
    return m;
}

// Random trace-1 PSD matrix: normalized Gram matrix of a random square factor.
SymMatrix random_density(Rng& rng, int n) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    Eigen::MatrixXd a = g * g.transpose();
    a /= a.trace();
    return SymMatrix::from_dense(a);
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("torus points reduce into the unit cell") {
    TorusPoint p{-0.25, 1.0};
    CHECK(p[0] == doctest::Approx(0.75));
    CHECK(p[1] == 0.0);
    CHECK(TorusPoint{0.5, 2.5} == TorusPoint{0.5, 0.5});
}

TEST_CASE("edges must have positive length and valid indices") {
    PeriodicNetwork net(2);
    const int a = net.add_node({0.1, 0.1});
    CHECK_THROWS_AS(net.add_edge(a, a, {0, 0}), InvalidNetwork);
    CHECK_THROWS_AS(net.add_edge(a, 3, {0, 0}), InvalidNetwork);
    CHECK_THROWS_AS(net.add_edge(a, a, {1}), InvalidNetwork);
    CHECK_THROWS_AS(net.add_edge(a, a, {1, 0}, -1.0), InvalidNetwork);
    CHECK_NOTHROW(net.add_edge(a, a, {1, 0}));
}

TEST_CASE("displacement follows the crossing vector") {
    const PeriodicNetwork h = fixtures::honeycomb();
    const double t = (3.0 - std::sqrt(3.0)) / 6.0;
    const Eigen::VectorXd d = h.displacement(1);
    CHECK(d[0] == doctest::Approx(1.0 - t));
    CHECK(d[1] == doctest::Approx(-t));
    CHECK(h.length(0) == doctest::Approx(std::sqrt(2.0) * t));
    // Outgoing tangents at the Fermat point are 120 degrees apart.
    const Eigen::VectorXd t0 = -h.tangent(0), t1 = h.tangent(1), t2 = h.tangent(2);
    CHECK(t0.dot(t1) == doctest::Approx(-0.5));
    CHECK(t1.dot(t2) == doctest::Approx(-0.5));
}

TEST_CASE("symmetric matrix basics") {
    const std::vector<double> upper{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    const SymMatrix m = SymMatrix::from_upper(3, upper);
    CHECK(m(1, 0) == 2.0);
    CHECK(m(2, 1) == 5.0);
    CHECK(m.trace() == 11.0);
    const Eigen::MatrixXd d = m.dense();
    CHECK(m.frobenius() == doctest::Approx(d.norm()));
    CHECK(SymMatrix::outer(Eigen::Vector2d(1, 2), 2.0)(0, 1) == 4.0);
    CHECK_THROWS(SymMatrix::from_upper(2, upper));
}

TEST_CASE("spectrum is ascending and PSD checks use a relative tolerance") {
    const Spectrum s = spectrum(diag({3.0, -1.0, 2.0}));
    CHECK(s.values[0] == doctest::Approx(-1.0));
    CHECK(s.values[2] == doctest::Approx(3.0));
    CHECK_FALSE(is_psd(diag({1.0, -1e-3})));
    CHECK(is_psd(diag({1.0, -1e-12})));
}

TEST_CASE("mass tensor by mode") {
    const PeriodicNetwork g = fixtures::square_grid();
    CHECK((mass_tensor({g, Mode::Tangential}) - SymMatrix::identity(2)).frobenius() < 1e-15);
    CHECK((mass_tensor({g, Mode::Isotropic}) - 2.0 * SymMatrix::identity(2)).frobenius() < 1e-15);
    const SymMatrix d = mass_tensor({fixtures::diagonal_loop(2.0), Mode::Tangential});
    // a ℓ T⊗T with ℓ = √2, T = (1,1)/√2.
    CHECK(d(0, 1) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("realizable dimension") {
    CHECK(realizable_dimension(diag({0.5, 0.3, 0.2})) == doctest::Approx(2.0));
    CHECK(realizable_dimension(diag({0.5, 0.5})) == doctest::Approx(2.0));
    CHECK_THROWS_AS(realizable_dimension(SymMatrix(2)), ZeroMatrix);
    CHECK_THROWS_AS(realizable_dimension(diag({1.0, -1.0})), NotPSD);
}

TEST_CASE("projection mixtures") {
    SUBCASE("half identity with k = 2 is a single atom") {
        const ProjectionMixture m = realize_as_mixture(diag({0.5, 0.5}), 2);
        CHECK(m.atoms.size() == 1);
        CHECK((m.reconstruct() - diag({0.5, 0.5})).frobenius() < 1e-12);
    }
    SUBCASE("a rank-one matrix is not a mixture of planes") {
        CHECK_THROWS_AS(realize_as_mixture(diag({1.0, 0.0}), 2), NotRealizable);
    }
    SUBCASE("three eigenvalues with k = 2") {
        const SymMatrix a = diag({0.5, 0.3, 0.2});
        const ProjectionMixture m = realize_as_mixture(a, 2);
        CHECK(m.atoms.size() <= 3);
        CHECK((m.reconstruct() - a).frobenius() <= 1e-10);
        double total = 0.0;
        for (const auto& atom : m.atoms) total += atom.lambda;
        CHECK(total == doctest::Approx(1.0));
    }
    SUBCASE("trace and PSD preconditions") {
        CHECK_THROWS_AS(realize_as_mixture(diag({0.5, 0.3}), 1), BadTrace);
        CHECK_THROWS_AS(realize_as_mixture(diag({1.5, -0.5}), 1), NotPSD);
        CHECK_THROWS_AS(realize_as_mixture(diag({0.5, 0.5}), 3), InvalidArgument);
    }
    SUBCASE("random densities realize exactly when lambda_max <= 1/k") {
        Rng rng(7);
        for (int trial = 0; trial < 200; ++trial) {
            const int n = 2 + trial % 3;
            const int k = 1 + trial % n;
            const SymMatrix a = random_density(rng, n);
            const double top = spectrum(a).values[n - 1];
            if (top <= 1.0 / k + kTolMix) {
                const ProjectionMixture m = realize_as_mixture(a, k);
                CHECK(static_cast<int>(m.atoms.size()) <= n);
                CHECK((m.reconstruct() - a).frobenius() <= 1e-10);
                for (const auto& atom : m.atoms) {
                    CHECK(atom.lambda >= 0.0);
                    CHECK((atom.basis.transpose() * atom.basis - Eigen::MatrixXd::Identity(k, k)).norm() < 1e-10);
                }
            } else {
                CHECK_THROWS_AS(realize_as_mixture(a, k), NotRealizable);
            }
        }
    }
}

TEST_CASE("kernel basis") {
    const Eigen::MatrixXd z = kernel_basis(SymMatrix(2));
    CHECK(z.cols() == 2);
    const Eigen::MatrixXd k = kernel_basis(diag({1.0, 1e-12}));
    REQUIRE(k.cols() == 1);
    CHECK(std::abs(k(1, 0)) == doctest::Approx(1.0));
    CHECK(kernel_basis(SymMatrix::identity(3)).cols() == 0);
}

TEST_CASE("largest principal angle") {
    const double a = 0.3;
    Eigen::MatrixXd u(2, 1), v(2, 1);
    u << 1.0, 0.0;
    v << std::cos(a), std::sin(a);
    CHECK(largest_principal_angle(u, v) == doctest::Approx(a));
    CHECK(largest_principal_angle(u, -u) == doctest::Approx(0.0));
    CHECK(largest_principal_angle(u, Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(std::numbers::pi / 2));
    CHECK(largest_principal_angle(Eigen::MatrixXd(2, 0), Eigen::MatrixXd(2, 0)) == 0.0);
}

TEST_CASE("seeded streams are reproducible") {
    Rng a(42), b(42), c(derive_seed(42, 1));
    for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
    CHECK(derive_seed(42, 1, 0) != derive_seed(42, 0, 1));
    for (int i = 0; i < 1000; ++i) {
        const double u = c.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(c.below(5) < 5);
    }
}

}  // TEST_SUITE
