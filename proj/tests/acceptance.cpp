// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "reticulate/adaptation.hpp"
#include "reticulate/analysis.hpp"
#include "reticulate/cellsolver.hpp"
#include "reticulate/commands.hpp"
#include "reticulate/fixtures.hpp"
#include "reticulate/network_io.hpp"
#include "reticulate/random.hpp"
#include "reticulate/topology.hpp"

using namespace reticulate;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string printf_string(const char* format, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, format, args...);
    return buffer;
}

SymMatrix tensor(const PeriodicNetwork& net) { return effective_tensor({net, Mode::Tangential}).Q; }

double distance(const SymMatrix& a, const SymMatrix& b) { return (a - b).frobenius(); }

std::string temp_file(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("reticulate_acceptance_" + name)).string();
}

Outcome square_grid_exactness() {
    const auto start = Clock::now();
    const std::string path = temp_file("square_grid.json");
    write_network_file(path, {fixtures::square_grid(), Mode::Tangential});
    std::ostringstream analyze, stationarity, err;
    const int rc_a = cli::cmd_analyze(path, {}, analyze, err);
    const int rc_s = cli::cmd_stationarity(path, stationarity, err);
    const double error = distance(tensor(fixtures::square_grid()), SymMatrix::identity(2));
    const double elapsed = seconds_since(start);
    std::filesystem::remove(path);
    const bool reported = analyze.str().find("Loopy / reticulate") != std::string::npos &&
                          stationarity.str().find("verdict: balanced; maximal") != std::string::npos;
    return {rc_a == 0 && rc_s == 0 && reported && error <= 1e-10 && elapsed < 1.0,
            printf_string("|Q-I|_F=%.3g, balanced and maximal reported: %s, %.3f s", error, reported ? "yes" : "no",
                          elapsed)};
}

Outcome kernel_matches_cycle_lattice() {
    const auto start = Clock::now();
    int ok = 0;
    double worst_angle = 0.0;
    for (int i = 0; i < 200; ++i) {
        const PeriodicNetwork net = planarize(fixtures::random_network(derive_seed(101, i)));
        const SymMatrix Q = tensor(net);
        const Classification c = classify(net);
        const Spectrum s = spectrum(Q);
        const double lmax = std::max(s.values.maxCoeff(), 0.0);
        int rank = 0;
        for (Eigen::Index j = 0; j < s.values.size(); ++j) rank += lmax > 0.0 && s.values[j] > 1e-8 * lmax;
        const double angle = largest_principal_angle(kernel_basis(Q), c.predicted_kernel);
        worst_angle = std::max(worst_angle, angle);
        ok += rank == c.total.rank && angle <= 1e-6;
    }
    const double elapsed = seconds_since(start);
    return {ok == 200 && elapsed < 60.0,
            printf_string("%d/200 rank and kernel matches, worst angle %.3g, %.2f s", ok, worst_angle, elapsed)};
}

Outcome canonical_classification() {
    const Classification seg = classify(fixtures::open_segment());
    const Classification diag = classify(fixtures::diagonal_loop());
    const Classification grid = classify(fixtures::square_grid());
    const bool kinds = seg.kind == LatticeKind::Trivial && diag.kind == LatticeKind::QuasiLaminate &&
                       diag.direction == IntVec{1, 1} && grid.kind == LatticeKind::Loopy && grid.reticulate;
    const double a = 1.0;
    const SymMatrix laminate = SymMatrix::outer(Eigen::Vector2d(1.0, 1.0), a / std::sqrt(2.0));
    const double e0 = tensor(fixtures::open_segment()).frobenius();
    const double e1 = distance(tensor(fixtures::diagonal_loop(a)), laminate);
    const double e2 = distance(tensor(fixtures::square_grid()), SymMatrix::identity(2));
    const double worst = std::max({e0, e1, e2});
    return {kinds && worst <= 1e-10,
            printf_string("kinds %s, worst closed-form error %.3g", kinds ? "match" : "differ", worst)};
}

Outcome balance_matches_maximality() {
    const auto start = Clock::now();
    int balanced_ok = 0, balanced_total = 0, unbalanced_ok = 0, unbalanced_total = 0, agree = 0;
    for (int i = 0; balanced_total < 50 && i < 1000; ++i) {
        const PeriodicNetwork base = planarize(fixtures::random_geodesic_union(derive_seed(202, i)));
        const auto weighted = stationary_weights(base, derive_seed(203, i));
        if (!weighted) continue;
        ++balanced_total;
        const NetworkMedium m{*weighted, Mode::Tangential};
        const MaximalityResult r = maximality_check(m);
        const bool balanced = balance_report(m).balanced;
        balanced_ok += r.gap_norm <= 1e-8 * r.mass.frobenius();
        agree += balanced == r.is_maximal;
    }
    for (int i = 0; unbalanced_total < 50 && i < 1000; ++i) {
        const NetworkMedium m{planarize(fixtures::random_network(derive_seed(204, i))), Mode::Tangential};
        const BalanceReport b = balance_report(m);
        if (b.max_residual < 1e-3) continue;
        ++unbalanced_total;
        const MaximalityResult r = maximality_check(m);
        unbalanced_ok += r.gap_norm >= 1e-6;
        agree += b.balanced == r.is_maximal;
    }
    const double elapsed = seconds_since(start);
    return {balanced_total == 50 && unbalanced_total == 50 && balanced_ok == 50 && unbalanced_ok == 50 &&
                agree == 100 && elapsed < 30.0,
            printf_string("balanced %d/%d, unbalanced %d/%d, agreement %d/100, %.2f s", balanced_ok, balanced_total,
                          unbalanced_ok, unbalanced_total, agree, elapsed)};
}

Outcome homogenization() {
    const auto start = Clock::now();
    const std::vector<int> R{2, 4, 8};
    auto errors = [&](const PeriodicNetwork& net) {
        const SymMatrix Q = tensor(net);
        const HomogenizationTrace trace = homogenize_window({net, Mode::Tangential}, R);
        std::vector<double> out;
        for (const auto& w : trace.windows) out.push_back(distance(w.Q_R, Q));
        return out;
    };
    const std::vector<double> grid = errors(fixtures::square_grid());
    const std::vector<double> regular = errors(fixtures::honeycomb());
    const std::vector<double> skewed = errors(fixtures::skewed_honeycomb());
    const double elapsed = seconds_since(start);

    bool grid_ok = true, regular_ok = true, rate_ok = true;
    for (double e : grid) grid_ok = grid_ok && e <= 1e-12;
    // A balanced network restricted to the box already carries the affine minimizer.
    for (double e : regular) regular_ok = regular_ok && e <= 1e-10;
    for (std::size_t i = 1; i < skewed.size(); ++i) rate_ok = rate_ok && skewed[i] <= 0.75 * skewed[i - 1];
    return {grid_ok && regular_ok && rate_ok && elapsed < 120.0,
            printf_string("square grid max %.2g; honeycomb %.2g %.2g %.2g; skewed honeycomb %.3g %.3g %.3g "
                          "(ratios %.3f %.3f); %.2f s",
                          std::max({grid[0], grid[1], grid[2]}), regular[0], regular[1], regular[2], skewed[0],
                          skewed[1], skewed[2], skewed[1] / skewed[0], skewed[2] / skewed[1], elapsed)};
}

Outcome fractional_monotonicity() {
    std::vector<double> radii;
    for (int i = 1; i <= 50; ++i) radii.push_back(0.4 * i / 50.0);
    const std::vector<std::pair<std::string, PeriodicNetwork>> maximal{
        {"square_grid", fixtures::square_grid()},
        {"honeycomb", fixtures::honeycomb()},
        {"diagonal_loop", fixtures::diagonal_loop()},
        {"diamond_chain", fixtures::diamond_chain(7)},
        {"triangulated_grid", fixtures::triangulated_grid(8)}};
    int passed = 0;
    std::string failures;
    for (std::size_t i = 0; i < maximal.size(); ++i) {
        const NetworkMedium m{maximal[i].second, Mode::Tangential};
        const bool stationary = maximality_check(m).is_maximal;
        const auto centers = sample_support_points(m.network, 20, derive_seed(606, i));
        const MonotonicityResult r = monotonicity_check(m, centers, radii, 1.0);
        if (stationary && r.pass) {
            ++passed;
        } else {
            failures += " " + maximal[i].first;
        }
    }
    const NetworkMedium dead{fixtures::t_junction(), Mode::Tangential};
    const auto centers = sample_support_points(dead.network, 20, derive_seed(606, 99));
    const MonotonicityResult counter = monotonicity_check(dead, centers, radii, 1.0);
    return {passed == 5 && !counter.pass,
            printf_string("%d/5 maximal fixtures monotone%s; dead end %s (worst drop %.3g)", passed, failures.c_str(),
                          counter.pass ? "passes" : "fails", counter.worst_violation)};
}

SymMatrix random_trace_one(int n, Rng& rng) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    const Eigen::MatrixXd basis = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    Eigen::VectorXd lambda(n);
    const double style = rng.uniform();
    for (int i = 0; i < n; ++i) {
        lambda[i] = style < 0.2 ? 1.0 : -std::log(1.0 - rng.uniform());
        if (style >= 0.8 && i > 0) lambda[i] = 0.0;
    }
    lambda /= lambda.sum();
    return SymMatrix::from_dense(basis * lambda.asDiagonal() * basis.transpose());
}

Outcome realizability() {
    const auto start = Clock::now();
    const std::vector<std::pair<int, int>> cases{{2, 1}, {2, 2}, {3, 2}};
    int ok = 0, realized = 0, refused = 0;
    double worst = 0.0;
    for (const auto& [n, k] : cases) {
        Rng rng(derive_seed(707, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k)));
        for (int i = 0; i < 500; ++i) {
            const SymMatrix A = random_trace_one(n, rng);
            const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A.dense()).eigenvalues().maxCoeff();
            const bool expected = lmax <= 1.0 / k + 1e-9;
            try {
                const ProjectionMixture mix = realize_as_mixture(A, k);
                const double error = distance(mix.reconstruct(), A);
                worst = std::max(worst, error);
                ++realized;
                ok += expected && static_cast<int>(mix.atoms.size()) <= n && error <= 1e-10;
            } catch (const NotRealizable&) {
                ++refused;
                ok += !expected;
            }
        }
    }
    const double elapsed = seconds_since(start);
    return {ok == 1500 && elapsed < 10.0,
            printf_string("%d/1500 agree with eigenvalue oracle (%d realized, %d refused), worst error %.3g, %.2f s",
                          ok, realized, refused, worst, elapsed)};
}

Outcome decomposition() {
    const PeriodicNetwork loops = fixtures::two_disjoint_loops();
    SymMatrix sum(2);
    for (const PeriodicNetwork& c : components(loops)) sum += tensor(c);
    const double additivity = distance(tensor(loops), sum);
    double gap_worst = 0.0;
    for (double delta : {0.2, 0.1, 0.01, 0.001}) gap_worst = std::max(gap_worst, tensor(fixtures::gap_segment(delta, 1.5)).frobenius());
    SymMatrix closed(2);
    closed.set(0, 0, 1.5);
    const double closed_error = distance(tensor(fixtures::gap_segment(0.0, 1.5)), closed);
    return {components(loops).size() == 2 && additivity <= 1e-10 && gap_worst <= 1e-10 && closed_error <= 1e-10,
            printf_string("|Q-(Q1+Q2)|=%.3g, open gaps |Q|<=%.3g, closed gap error %.3g", additivity, gap_worst,
                          closed_error)};
}

Outcome subdivision() {
    int ok = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const PeriodicNetwork net = fixtures::random_network(derive_seed(909, i));
        Rng rng(derive_seed(910, i));
        std::vector<int> parts;
        for (int e = 0; e < net.edge_count(); ++e) parts.push_back(1 + static_cast<int>(rng.below(5)));
        const double error = distance(tensor(subdivide(net, parts)), tensor(net));
        worst = std::max(worst, error);
        ok += error <= 1e-9;
    }
    return {ok == 100, printf_string("%d/100 within 1e-9, worst %.3g", ok, worst)};
}

std::string trace_text(const AdaptationTrace& trace) {
    std::string text;
    for (const AdaptationStep& s : trace.steps) {
        text += printf_string("%d,%.17g,%.17g,%.17g,%.17g,%.17g", s.t, s.lambda_min, s.lambda_max, s.lambda_min_ratio,
                              s.dissipation, s.total_mass);
        for (double w : s.weights) text += printf_string(",%.17g", w);
        text += '\n';
    }
    return text;
}

Outcome adaptation() {
    const auto start = Clock::now();
    const int m = 8;
    const NetworkMedium grid{fixtures::triangulated_grid(m), Mode::Tangential};
    const double initial_mass = mass_tensor(grid).trace();
    AdaptOptions options;
    options.steps = 60;
    options.samples_per_step = 16;
    options.dt = 0.1;

    int wins = 0;
    double mass_drift = 0.0;
    bool deterministic = true;
    for (int seed = 0; seed < 20; ++seed) {
        FluctuationModel random;
        random.source_node = 0;
        random.patch_count = 4;
        random.seed = static_cast<std::uint64_t>(seed);
        FluctuationModel fixed = random;
        fixed.kind = FluctuationModel::Kind::FixedSink;
        fixed.sink_node = (m / 2) * m + m / 2;

        const AdaptationTrace r = adapt(grid, random, options);
        const AdaptationTrace f = adapt(grid, fixed, options);
        wins += r.steps.back().lambda_min_ratio > f.steps.back().lambda_min_ratio;
        for (const AdaptationTrace* t : {&r, &f})
            for (const AdaptationStep& s : t->steps) mass_drift = std::max(mass_drift, std::abs(s.total_mass - initial_mass));

        if (seed < 3) {
            const std::string reference = trace_text(r);
            for (int threads : {1, 2, 8}) {
                AdaptOptions threaded = options;
                threaded.threads = threads;
                deterministic = deterministic && trace_text(adapt(grid, random, threaded)) == reference;
            }
        }
    }
    const double elapsed = seconds_since(start);
    return {wins >= 16 && mass_drift <= 1e-9 && deterministic && elapsed < 300.0,
            printf_string("random beats fixed sink in %d/20 seeds, mass drift %.3g, traces %s across 1/2/8 threads, "
                          "%.1f s",
                          wins, mass_drift, deterministic ? "identical" : "differ", elapsed)};
}

Outcome irreducibility() {
    const auto start = Clock::now();
    const PeriodicNetwork net = fixtures::diamond_chain(7);
    const IrreducibilityResult r = irreducible(net, 40);
    const Valency v = valency(net);
    return {r.verdict == Reducibility::Irreducible && v.max == 4,
            printf_string("verdict %s, max valency %d, %lld subsets, %.2f s", std::string(to_string(r.verdict)).c_str(),
                          v.max, r.checked_subsets, seconds_since(start))};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"square-grid exactness", square_grid_exactness},
        {"rank and kernel of Q on random planar networks", kernel_matches_cycle_lattice},
        {"canonical two-dimensional classification", canonical_classification},
        {"balanced networks attain the upper bound", balance_matches_maximality},
        {"windowed homogenization", homogenization},
        {"fractional monotonicity", fractional_monotonicity},
        {"realizability of trace-one matrices", realizability},
        {"component decomposition and gap family", decomposition},
        {"subdivision invariance", subdivision},
        {"adaptation under fluctuating sources", adaptation},
        {"irreducible diamond chain", irreducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        failed += !outcome.pass;
        std::printf("%s %2zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    outcome.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
