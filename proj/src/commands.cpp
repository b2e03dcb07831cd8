#include "reticulate/commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "reticulate/adaptation.hpp"
#include "reticulate/analysis.hpp"
#include "reticulate/cellsolver.hpp"
#include "reticulate/fixtures.hpp"
#include "reticulate/network_io.hpp"
#include "reticulate/topology.hpp"

namespace reticulate::cli {

namespace {

// -0.0 prints as 0 so reports do not depend on the sign of zero.
double clean(double x) { return x == 0.0 ? 0.0 : x; }

std::string format_g17(double x) { return fmt::format("{:.17g}", clean(x)); }

std::string format_int_vec(const IntVec& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += fmt::format("{}{}", i ? "," : "", v[i]);
    return s + ")";
}

std::string format_vector(const Eigen::VectorXd& v) {
    std::string s = "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_sci(v[i]);
    return s + "]";
}

// Loads a network for a command that works on the support set: n = 2 networks
// are planarized.
PeriodicNetwork support_network(const PeriodicNetwork& net, bool planarize_n2) {
    if (planarize_n2 && net.dimension() == 2) return planarize(net);
    return net;
}

std::string verdict_label(const Classification& c, const SymMatrix& Q) {
    switch (c.kind) {
        case LatticeKind::Loopy:
            return c.reticulate ? "Loopy / reticulate" : "Loopy / not reticulate";
        case LatticeKind::QuasiLaminate:
            return "QuasiLaminate dir " + format_int_vec(c.direction);
        case LatticeKind::Trivial:
            return Q.frobenius() <= 1e-12 ? "Trivial; Q=0" : "Trivial";
        case LatticeKind::Intermediate:
            return fmt::format("Intermediate (rank {})", c.total.rank);
    }
    return "?";
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace

std::string format_sci(double x) { return fmt::format("{:.12e}", clean(x)); }

std::string format_matrix(const SymMatrix& m, const std::string& indent) {
    std::string s;
    for (int i = 0; i < m.dim(); ++i) {
        s += indent + "[";
        for (int j = 0; j < m.dim(); ++j) s += (j ? " " : "") + format_sci(m(i, j));
        s += "]\n";
    }
    return s;
}

int cmd_analyze(const std::string& path, const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const NetworkMedium input = read_network_file(path);
        const NetworkMedium medium{support_network(input.network, options.planarize), input.mode};
        const PeriodicNetwork& net = medium.network;
        const int n = net.dimension();

        out << fmt::format("network: {} nodes, {} edges, dimension {}, mode {}\n", input.network.node_count(),
                           input.network.edge_count(), n, to_string(medium.mode));
        if (options.planarize && n == 2)
            out << fmt::format("planarized: {} nodes, {} edges\n", net.node_count(), net.edge_count());

        const SymMatrix mass = mass_tensor(medium);
        const EffectiveTensor eff = effective_tensor(medium);
        const Spectrum sp = spectrum(eff.Q);
        const Eigen::MatrixXd kernel = kernel_basis(eff.Q, options.tol_rank);
        const Classification cls = classify(net);

        out << "mass tensor:\n" << format_matrix(mass);
        out << "Q:\n" << format_matrix(eff.Q);
        out << "eigenvalues: " << format_vector(sp.values) << '\n';
        out << fmt::format("rank: {} (tol_rank {})\n", n - kernel.cols(), format_sci(options.tol_rank));
        out << fmt::format("numerical kernel: dimension {}\n", kernel.cols());
        for (Eigen::Index c = 0; c < kernel.cols(); ++c) out << "  " << format_vector(kernel.col(c)) << '\n';
        for (const ComponentLattice& cl : cls.per_component) {
            out << fmt::format("component {}: cycle lattice rank {}", cl.component, cl.lattice.rank);
            for (const IntVec& row : cl.lattice.basis) out << ' ' << format_int_vec(row);
            out << '\n';
        }
        out << fmt::format("cycle lattice: rank {}", cls.total.rank);
        for (const IntVec& row : cls.total.basis) out << ' ' << format_int_vec(row);
        out << '\n';
        out << fmt::format("predicted kernel: dimension {}\n", cls.predicted_kernel.cols());
        for (Eigen::Index c = 0; c < cls.predicted_kernel.cols(); ++c)
            out << "  " << format_vector(cls.predicted_kernel.col(c)) << '\n';

        const double angle = largest_principal_angle(kernel, cls.predicted_kernel);
        const bool match = kernel.cols() == cls.predicted_kernel.cols() && angle <= 1e-6;
        out << fmt::format("verdict: {}; kernel match: {} (angle={:.3g})\n", verdict_label(cls, eff.Q),
                           match ? "yes" : "no", clean(angle));
        return match ? kExitOk : kExitVerdict;
    });
}

int cmd_stationarity(const std::string& path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const NetworkMedium medium = read_network_file(path);
        const NetworkMedium tangential{medium.network, Mode::Tangential};
        const BalanceReport report = balance_report(medium);
        const MaximalityResult tmax = maximality_check(tangential);

        out << fmt::format("max residual: {}\n", format_sci(report.max_residual));
        for (const NodeResidual& r : report.per_node)
            if (r.norm > kTolBalance) out << fmt::format("  node {}: residual {}\n", r.node, format_vector(r.residual));
        const std::string balance = report.balanced
                                        ? "balanced"
                                        : fmt::format("unbalanced (res {:.6g})", report.max_residual);

        if (medium.mode == Mode::Isotropic) {
            const MaximalityResult imax = maximality_check(medium);
            out << "mass tensor:\n" << format_matrix(imax.mass) << "Q:\n" << format_matrix(imax.Q);
            out << fmt::format("gap norm: {} (tangential submedium: {})\n", format_sci(imax.gap_norm),
                               format_sci(tmax.gap_norm));
            out << "note: " << report.note << '\n';
            const bool agree = report.balanced == tmax.is_maximal;
            out << fmt::format("verdict: tangential residual {}; {}; tangential verdicts {}\n",
                               report.balanced ? "0" : fmt::format("{:.6g}", report.max_residual),
                               imax.is_maximal ? "maximal" : "NOT maximal (isotropic mass excess)",
                               agree ? "agree" : "disagree");
            return agree ? kExitOk : kExitVerdict;
        }

        out << "mass tensor:\n" << format_matrix(tmax.mass) << "Q:\n" << format_matrix(tmax.Q);
        out << fmt::format("gap norm: {} (tol {})\n", format_sci(tmax.gap_norm), format_sci(tol_wiener(tmax.mass)));
        const bool agree = report.balanced == tmax.is_maximal;
        out << fmt::format("verdict: {}; {}; verdicts {}\n", balance, tmax.is_maximal ? "maximal" : "not maximal",
                           agree ? "agree" : "disagree");
        return agree ? kExitOk : kExitVerdict;
    });
}

int cmd_homogenize(const std::string& path, const std::vector<int>& R, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const NetworkMedium medium = read_network_file(path);
        const int n = medium.network.dimension();
        const SymMatrix Q = effective_tensor(medium).Q;
        const HomogenizationTrace trace = homogenize_window(medium, R);
        out << "R";
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) out << fmt::format(",q{}{}", i + 1, j + 1);
        out << ",error_F\n";
        for (const HomogenizationWindow& w : trace.windows) {
            out << w.R;
            for (double q : w.Q_R.upper()) out << ',' << format_g17(q);
            out << ',' << format_g17((w.Q_R - Q).frobenius()) << '\n';
        }
        return kExitOk;
    });
}

int cmd_monotonicity(const std::string& path, const MonotonicityOptions& options, std::ostream& out,
                     std::ostream& err) {
    return guarded(err, [&] {
        if (options.radii < 1) throw InvalidArgument("--radii must be at least 1");
        const NetworkMedium medium = read_network_file(path);
        std::vector<double> radii;
        for (int i = 1; i <= options.radii; ++i) radii.push_back(options.r_max * i / options.radii);
        const std::vector<TorusPoint> centers = sample_support_points(medium.network, options.centers, options.seed);
        const MonotonicityResult res = monotonicity_check(medium, centers, radii, options.alpha);

        out << fmt::format("centers: {}, radii: {} in (0, {}], alpha: {}\n", centers.size(), radii.size(),
                           format_g17(options.r_max), format_g17(options.alpha));
        out << fmt::format("worst violation: {}", format_sci(res.worst_violation));
        if (res.worst_center >= 0) {
            std::string where;
            for (double x : centers[static_cast<std::size_t>(res.worst_center)].coords())
                where += (where.empty() ? "" : ", ") + format_g17(x);
            out << fmt::format(" at center {} ({})", res.worst_center, where);
        }
        out << '\n' << "verdict: " << (res.pass ? "monotone" : "NOT monotone") << '\n';

        if (!options.out.empty()) {
            std::ofstream csv(options.out, std::ios::binary);
            if (!csv) throw ParseError("cannot write " + options.out);
            csv << "center,r,mass,ratio\n";
            for (std::size_t c = 0; c < res.profiles.size(); ++c) {
                const auto& p = res.profiles[c];
                for (std::size_t k = 0; k < p.radii.size(); ++k)
                    csv << c << ',' << format_g17(p.radii[k]) << ',' << format_g17(p.masses[k]) << ','
                        << format_g17(p.masses[k] / std::pow(p.radii[k], options.alpha)) << '\n';
            }
        }
        return res.pass ? kExitOk : kExitVerdict;
    });
}

int cmd_adapt(const std::string& path, const AdaptCommandOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const NetworkMedium medium = read_network_file(path);
        FluctuationModel model;
        model.source_node = options.source;
        model.patch_count = options.patch_count;
        model.patch_strength = options.strength;
        model.seed = options.seed;
        if (options.mode == "random") {
            model.kind = FluctuationModel::Kind::Random;
        } else if (options.mode.rfind("fixed:", 0) == 0) {
            model.kind = FluctuationModel::Kind::FixedSink;
            try {
                std::size_t used = 0;
                const std::string node = options.mode.substr(6);
                model.sink_node = std::stoi(node, &used);
                if (used != node.size()) throw std::invalid_argument(node);
            } catch (const std::logic_error&) {
                throw InvalidArgument("--mode fixed:NODE needs an integer node index");
            }
        } else {
            throw InvalidArgument("--mode must be random or fixed:NODE");
        }
        AdaptOptions opts;
        opts.steps = options.steps;
        opts.samples_per_step = options.samples;
        opts.dt = options.dt;
        opts.trace_stride = options.stride;
        const AdaptationTrace trace = adapt(medium, model, opts);

        std::ostringstream csv;
        csv << "step,lambda_min,lambda_max,ratio,dissipation,total_mass\n";
        for (const AdaptationStep& s : trace.steps)
            csv << s.t << ',' << format_g17(s.lambda_min) << ',' << format_g17(s.lambda_max) << ','
                << format_g17(s.lambda_min_ratio) << ',' << format_g17(s.dissipation) << ','
                << format_g17(s.total_mass) << '\n';
        if (options.out.empty()) {
            out << csv.str();
        } else {
            std::ofstream file(options.out, std::ios::binary);
            if (!file) throw ParseError("cannot write " + options.out);
            file << csv.str();
        }
        for (const AdaptationEvent& e : trace.events)
            err << fmt::format("event: {} on edge {} at step {}\n", e.what, e.edge, e.t);
        if (!trace.steps.empty())
            out << fmt::format("final lambda_min ratio: {}\n", format_g17(trace.steps.back().lambda_min_ratio));
        return kExitOk;
    });
}

int cmd_realize(const std::string& matrix, int k, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::vector<double> entries;
        std::stringstream ss(matrix);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                entries.push_back(std::stod(item, &used));
                while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::logic_error&) {
                throw InvalidArgument("--matrix: cannot parse entry '" + item + "'");
            }
        }
        int n = 0;
        while (n * (n + 1) / 2 < static_cast<int>(entries.size())) ++n;
        if (n == 0 || n * (n + 1) / 2 != static_cast<int>(entries.size()))
            throw InvalidArgument("--matrix needs n(n+1)/2 upper-triangle entries");
        const SymMatrix a = SymMatrix::from_upper(n, entries);
        try {
            const ProjectionMixture mix = realize_as_mixture(a, k);
            out << fmt::format("realizable dimension: {}\n", format_g17(realizable_dimension(a)));
            out << fmt::format("atoms: {}\n", mix.atoms.size());
            for (std::size_t i = 0; i < mix.atoms.size(); ++i) {
                out << fmt::format("atom {}: lambda {}\n", i, format_sci(mix.atoms[i].lambda));
                for (Eigen::Index c = 0; c < mix.atoms[i].basis.cols(); ++c)
                    out << "  " << format_vector(mix.atoms[i].basis.col(c)) << '\n';
            }
            out << fmt::format("reconstruction error: {}\n", format_sci((mix.reconstruct() - a).frobenius()));
            return kExitOk;
        } catch (const NotRealizable& e) {
            out << "NotRealizable: " << e.what() << '\n';
            return kExitVerdict;
        }
    });
}

int cmd_decompose(const std::string& path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const NetworkMedium input = read_network_file(path);
        const NetworkMedium medium{support_network(input.network, true), input.mode};
        const int n = medium.network.dimension();
        const SymMatrix total = effective_tensor(medium).Q;
        const std::vector<PeriodicNetwork> parts = components(medium.network);
        SymMatrix sum(n);
        out << fmt::format("components: {}\n", parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const SymMatrix Qi = effective_tensor({parts[i], medium.mode}).Q;
            sum += Qi;
            out << fmt::format("component {}: {} nodes, {} edges\n", i, parts[i].node_count(), parts[i].edge_count())
                << format_matrix(Qi);
        }
        out << "Q total:\n" << format_matrix(total);
        const double diff = (sum - total).frobenius();
        const bool ok = diff <= 1e-9 * (1.0 + total.frobenius());
        out << fmt::format("sum of component Q: {} (difference {})\n", ok ? "matches" : "MISMATCH", format_sci(diff));
        return ok ? kExitOk : kExitVerdict;
    });
}

int cmd_fixture(const std::string& name, const std::string& mode, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto net = fixtures::by_name(name);
        if (!net) throw InvalidArgument("unknown fixture '" + name + "'");
        Mode m = Mode::Tangential;
        if (mode == "isotropic") m = Mode::Isotropic;
        else if (mode != "tangential") throw InvalidArgument("mode must be tangential or isotropic");
        out << serialize_network({*net, m});
        return kExitOk;
    });
}

}  // namespace reticulate::cli
