#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reticulate/adaptation.hpp"
#include "reticulate/analysis.hpp"
#include "reticulate/cellsolver.hpp"
#include "reticulate/core.hpp"
#include "reticulate/fixtures.hpp"
#include "reticulate/network_io.hpp"
#include "reticulate/topology.hpp"

namespace py = pybind11;
using namespace reticulate;

namespace {

Eigen::MatrixXd dense(const SymMatrix& m) { return m.dense(); }

SymMatrix sym(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw InvalidArgument("matrix must be square");
    if ((m - m.transpose()).norm() > 1e-12 * (1.0 + m.norm()))
        throw InvalidArgument("matrix must be symmetric");
    return SymMatrix::from_dense(m);
}

Mode parse_mode(const std::string& mode) {
    if (mode == "tangential") return Mode::Tangential;
    if (mode == "isotropic") return Mode::Isotropic;
    throw InvalidArgument("mode must be 'tangential' or 'isotropic'");
}

NetworkMedium medium(const PeriodicNetwork& net, const std::string& mode) { return {net, parse_mode(mode)}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Effective conductance of periodic network media on the flat torus.";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidNetwork>(m, "InvalidNetwork", error.ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
    py::register_exception<NotRealizable>(m, "NotRealizable", error.ptr());
    py::register_exception<BadTrace>(m, "BadTrace", error.ptr());
    py::register_exception<SolveFailure>(m, "SolveFailure", error.ptr());
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", error.ptr());
    py::register_exception<NotStationary>(m, "NotStationary", error.ptr());
    py::register_exception<RadiusTooLarge>(m, "RadiusTooLarge", error.ptr());
    py::register_exception<DegenerateProfile>(m, "DegenerateProfile", error.ptr());
    py::register_exception<DimensionUnsupported>(m, "DimensionUnsupported", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());

    py::class_<Edge>(m, "Edge")
        .def_readonly("u", &Edge::u)
        .def_readonly("v", &Edge::v)
        .def_readonly("shift", &Edge::shift)
        .def_readonly("weight", &Edge::weight)
        .def("__repr__", [](const Edge& e) {
            return py::str("Edge(u={}, v={}, shift={}, weight={})").format(e.u, e.v, e.shift, e.weight);
        });

    py::class_<PeriodicNetwork>(m, "Network")
        .def(py::init<int>(), py::arg("dimension") = 2)
        .def("add_node", [](PeriodicNetwork& n, std::vector<double> x) { return n.add_node(TorusPoint(std::move(x))); })
        .def("add_edge", &PeriodicNetwork::add_edge, py::arg("u"), py::arg("v"), py::arg("shift"),
             py::arg("weight") = 1.0)
        .def_property_readonly("dimension", &PeriodicNetwork::dimension)
        .def_property_readonly("node_count", &PeriodicNetwork::node_count)
        .def_property_readonly("edge_count", &PeriodicNetwork::edge_count)
        .def_property_readonly("nodes",
                               [](const PeriodicNetwork& n) {
                                   std::vector<std::vector<double>> out;
                                   for (const TorusPoint& p : n.nodes()) out.push_back(p.coords());
                                   return out;
                               })
        .def_property_readonly("edges", &PeriodicNetwork::edges)
        .def("set_weight", &PeriodicNetwork::set_weight)
        .def("displacement", &PeriodicNetwork::displacement)
        .def("length", &PeriodicNetwork::length)
        .def("__eq__", [](const PeriodicNetwork& a, const PeriodicNetwork& b) { return a == b; });

    m.def("mass_tensor", [](const PeriodicNetwork& n, const std::string& mode) { return dense(mass_tensor(medium(n, mode))); },
          py::arg("network"), py::arg("mode") = "tangential");
    m.def(
        "effective_tensor",
        [](const PeriodicNetwork& n, const std::string& mode) { return dense(effective_tensor(medium(n, mode)).Q); },
        py::arg("network"), py::arg("mode") = "tangential");
    m.def("realizable_dimension", [](const Eigen::MatrixXd& a) { return realizable_dimension(sym(a)); });
    m.def(
        "realize_as_mixture",
        [](const Eigen::MatrixXd& a, int k) {
            const ProjectionMixture mix = realize_as_mixture(sym(a), k);
            py::list atoms;
            for (const MixtureAtom& atom : mix.atoms) atoms.append(py::make_tuple(atom.lambda, atom.basis));
            return py::make_tuple(atoms, dense(mix.reconstruct()));
        },
        py::arg("matrix"), py::arg("k"));
    m.def("kernel_basis", [](const Eigen::MatrixXd& a, double tol) { return kernel_basis(sym(a), tol); },
          py::arg("matrix"), py::arg("tol_rank") = kDefaultTolRank);

    m.def("planarize", &planarize, py::arg("network"), py::arg("eps_geom") = kDefaultEpsGeom);
    m.def("components", &components);
    m.def("classify", [](const PeriodicNetwork& n) {
        const Classification c = classify(n);
        py::dict out;
        out["kind"] = std::string(to_string(c.kind));
        out["direction"] = c.direction;
        out["rank"] = c.total.rank;
        out["basis"] = c.total.basis;
        out["reticulate"] = c.reticulate;
        out["predicted_kernel"] = c.predicted_kernel;
        return out;
    });
    m.def("subdivide", &subdivide, py::arg("network"), py::arg("parts") = std::vector<int>{});

    m.def(
        "balance_report",
        [](const PeriodicNetwork& n, const std::string& mode) {
            const BalanceReport r = balance_report(medium(n, mode));
            std::vector<double> residuals;
            for (const NodeResidual& node : r.per_node) residuals.push_back(node.norm);
            py::dict out;
            out["balanced"] = r.balanced;
            out["max_residual"] = r.max_residual;
            out["residuals"] = residuals;
            out["note"] = r.note;
            return out;
        },
        py::arg("network"), py::arg("mode") = "tangential");
    m.def(
        "maximality_check",
        [](const PeriodicNetwork& n, const std::string& mode) {
            const MaximalityResult r = maximality_check(medium(n, mode));
            py::dict out;
            out["is_maximal"] = r.is_maximal;
            out["gap_norm"] = r.gap_norm;
            out["gap"] = dense(r.gap);
            out["mass"] = dense(r.mass);
            out["Q"] = dense(r.Q);
            return out;
        },
        py::arg("network"), py::arg("mode") = "tangential");
    m.def("stationary_weights", &stationary_weights, py::arg("network"), py::arg("seed") = 0);
    m.def(
        "irreducible",
        [](const PeriodicNetwork& n, int budget) {
            const IrreducibilityResult r = irreducible(n, budget);
            return py::make_tuple(std::string(to_string(r.verdict)), r.witness_a, r.witness_b);
        },
        py::arg("network"), py::arg("budget_edges") = 16);
    m.def("max_valency", [](const PeriodicNetwork& n) { return valency(n).max; });
    m.def(
        "ball_mass_profile",
        [](const PeriodicNetwork& n, std::vector<double> center, std::vector<double> radii, const std::string& mode) {
            return ball_mass_profile(medium(n, mode), TorusPoint(std::move(center)), std::move(radii)).masses;
        },
        py::arg("network"), py::arg("center"), py::arg("radii"), py::arg("mode") = "tangential");
    m.def(
        "monotonicity_check",
        [](const PeriodicNetwork& n, std::vector<std::vector<double>> centers, std::vector<double> radii, double alpha,
           const std::string& mode) {
            std::vector<TorusPoint> points;
            for (auto& c : centers) points.emplace_back(std::move(c));
            const MonotonicityResult r = monotonicity_check(medium(n, mode), points, radii, alpha);
            return py::make_tuple(r.pass, r.worst_violation, r.worst_center);
        },
        py::arg("network"), py::arg("centers"), py::arg("radii"), py::arg("alpha") = 1.0,
        py::arg("mode") = "tangential");
    m.def(
        "homogenize_window",
        [](const PeriodicNetwork& n, std::vector<int> R) {
            std::vector<Eigen::MatrixXd> out;
            for (const HomogenizationWindow& w : homogenize_window({n, Mode::Tangential}, std::move(R)).windows)
                out.push_back(dense(w.Q_R));
            return out;
        },
        py::arg("network"), py::arg("R"));
    m.def(
        "adapt",
        [](const PeriodicNetwork& n, int source, int patch_count, const std::string& kind, int sink, int steps,
           int samples, double dt, std::uint64_t seed) {
            FluctuationModel model;
            model.source_node = source;
            model.patch_count = patch_count;
            model.sink_node = sink;
            model.seed = seed;
            if (kind == "fixed") {
                model.kind = FluctuationModel::Kind::FixedSink;
            } else if (kind != "random") {
                throw InvalidArgument("kind must be 'random' or 'fixed'");
            }
            AdaptOptions options;
            options.steps = steps;
            options.samples_per_step = samples;
            options.dt = dt;
            py::list rows;
            for (const AdaptationStep& s : adapt({n, Mode::Tangential}, model, options).steps) {
                py::dict row;
                row["t"] = s.t;
                row["weights"] = s.weights;
                row["lambda_min_ratio"] = s.lambda_min_ratio;
                row["dissipation"] = s.dissipation;
                row["total_mass"] = s.total_mass;
                rows.append(row);
            }
            return rows;
        },
        py::arg("network"), py::arg("source") = 0, py::arg("patch_count") = 4, py::arg("kind") = "random",
        py::arg("sink") = 0, py::arg("steps") = 100, py::arg("samples") = 16, py::arg("dt") = 0.1,
        py::arg("seed") = 0);

    m.def(
        "parse_network",
        [](const std::string& text) {
            NetworkMedium med = parse_network(text);
            return py::make_tuple(std::move(med.network), std::string(to_string(med.mode)));
        },
        py::arg("text"));
    m.def(
        "serialize_network",
        [](const PeriodicNetwork& n, const std::string& mode) { return serialize_network(medium(n, mode)); },
        py::arg("network"), py::arg("mode") = "tangential");
    m.def("fixture_names", &fixtures::names);
    m.def("fixture", [](const std::string& name) {
        auto net = fixtures::by_name(name);
        if (!net) throw InvalidArgument("unknown fixture: " + name);
        return *net;
    });
}
