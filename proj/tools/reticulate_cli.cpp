#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reticulate/commands.hpp"

int main(int argc, char** argv) {
    using namespace reticulate::cli;
    CLI::App app{"Effective conductance of periodic network media on the flat torus"};
    app.require_subcommand(1);

    std::string path;
    int code = kExitOk;

    AnalyzeOptions analyze;
    auto* a = app.add_subcommand("analyze", "Q, kernel, cycle lattice and classification");
    a->add_option("network", path, "NetworkFile JSON")->required();
    a->add_option("--tol-rank", analyze.tol_rank, "Relative eigenvalue threshold for the kernel");
    bool no_planarize = false;
    a->add_flag("--no-planarize", no_planarize, "Use the graph as given (n=2)");
    a->callback([&] {
        analyze.planarize = !no_planarize;
        code = cmd_analyze(path, analyze, std::cout, std::cerr);
    });

    auto* s = app.add_subcommand("stationarity", "Node balance against maximality");
    s->add_option("network", path, "NetworkFile JSON")->required();
    s->callback([&] { code = cmd_stationarity(path, std::cout, std::cerr); });

    std::vector<int> R;
    auto* h = app.add_subcommand("homogenize", "Windowed tensors Q_R as CSV");
    h->add_option("network", path, "NetworkFile JSON")->required();
    h->add_option("--R", R, "Window half-widths")->delimiter(',')->required();
    h->callback([&] { code = cmd_homogenize(path, R, std::cout, std::cerr); });

    MonotonicityOptions mono;
    auto* m = app.add_subcommand("monotonicity", "Ball-mass density ratios at sampled centers");
    m->add_option("network", path, "NetworkFile JSON")->required();
    m->add_option("--alpha", mono.alpha, "Exponent of r");
    m->add_option("--centers", mono.centers, "Number of sampled centers");
    m->add_option("--seed", mono.seed, "Sampling seed");
    m->add_option("--radii", mono.radii, "Number of radii, evenly spaced in (0, rmax]");
    m->add_option("--rmax", mono.r_max, "Largest radius (< 0.5)");
    m->add_option("--out", mono.out, "Profile CSV");
    m->callback([&] { code = cmd_monotonicity(path, mono, std::cout, std::cerr); });

    AdaptCommandOptions adapt;
    auto* d = app.add_subcommand("adapt", "Fluctuation-driven conductance adaptation");
    d->add_option("network", path, "NetworkFile JSON")->required();
    d->add_option("--steps", adapt.steps, "Number of steps");
    d->add_option("--samples", adapt.samples, "Injection samples per step");
    d->add_option("--dt", adapt.dt, "Step size");
    d->add_option("--seed", adapt.seed, "Seed");
    d->add_option("--mode", adapt.mode, "random or fixed:NODE");
    d->add_option("--source", adapt.source, "Source node");
    d->add_option("--k", adapt.patch_count, "Active sinks per sample");
    d->add_option("--strength", adapt.strength, "Mass per active sink");
    d->add_option("--stride", adapt.stride, "Record every this many steps");
    d->add_option("--out", adapt.out, "Trace CSV (default: standard output)");
    d->callback([&] { code = cmd_adapt(path, adapt, std::cout, std::cerr); });

    std::string matrix;
    int k = 1;
    auto* r = app.add_subcommand("realize", "Projection-mixture realization of a trace-1 PSD matrix");
    r->add_option("--matrix", matrix, "Row-major upper triangle a11,a12,...")->required();
    r->add_option("--k", k, "Plane dimension")->required();
    r->callback([&] { code = cmd_realize(matrix, k, std::cout, std::cerr); });

    auto* c = app.add_subcommand("decompose", "Per-component effective tensors");
    c->add_option("network", path, "NetworkFile JSON")->required();
    c->callback([&] { code = cmd_decompose(path, std::cout, std::cerr); });

    std::string name;
    std::string mode = "tangential";
    auto* f = app.add_subcommand("fixture", "Print a built-in network as JSON");
    f->add_option("name", name, "Fixture name")->required();
    f->add_option("--mode", mode, "tangential or isotropic");
    f->callback([&] { code = cmd_fixture(name, mode, std::cout, std::cerr); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitError;
    }
    return code;
}
