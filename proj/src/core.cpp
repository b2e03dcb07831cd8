#include "reticulate/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace reticulate {

double wrap_unit(double x) {
    double r = x - std::floor(x);
    // x slightly below an integer can round up to exactly 1.
    return r >= 1.0 ? 0.0 : r;
}

TorusPoint::TorusPoint(std::vector<double> coords) : coords_(std::move(coords)) {
    for (double& c : coords_) {
        if (!std::isfinite(c)) throw InvalidNetwork("torus coordinate is not finite");
        c = wrap_unit(c);
    }
}

Eigen::VectorXd TorusPoint::vec() const {
    return Eigen::Map<const Eigen::VectorXd>(coords_.data(), dimension());
}

PeriodicNetwork::PeriodicNetwork(int dimension) : dimension_(dimension) {
    if (dimension < 1) throw InvalidNetwork("dimension must be at least 1");
}

PeriodicNetwork::PeriodicNetwork(int dimension, std::vector<TorusPoint> nodes,
                                 std::vector<Edge> edges)
    : dimension_(dimension), nodes_(std::move(nodes)), edges_(std::move(edges)) {
    validate();
}

int PeriodicNetwork::add_node(TorusPoint p) {
    if (p.dimension() != dimension_)
        throw InvalidNetwork("node has dimension " + std::to_string(p.dimension()) +
                             ", network has " + std::to_string(dimension_));
    nodes_.push_back(std::move(p));
    return node_count() - 1;
}

int PeriodicNetwork::add_edge(int u, int v, IntVec shift, double weight) {
    Edge e{u, v, std::move(shift), weight};
    check_edge(e);
    edges_.push_back(std::move(e));
    return edge_count() - 1;
}

void PeriodicNetwork::set_weight(int e, double w) {
    if (!std::isfinite(w) || w < 0.0) throw InvalidNetwork("weight must be finite and >= 0");
    edges_.at(static_cast<std::size_t>(e)).weight = w;
}

void PeriodicNetwork::scale_weights(double factor) {
    if (!std::isfinite(factor) || factor < 0.0) throw InvalidNetwork("bad weight scale");
    for (Edge& e : edges_) e.weight *= factor;
}

Eigen::VectorXd PeriodicNetwork::displacement(int e) const {
    const Edge& ed = edge(e);
    Eigen::VectorXd d(dimension_);
    const TorusPoint& xu = node(ed.u);
    const TorusPoint& xv = node(ed.v);
    for (int i = 0; i < dimension_; ++i)
        d[i] = xv[i] + static_cast<double>(ed.shift[static_cast<std::size_t>(i)]) - xu[i];
    return d;
}

double PeriodicNetwork::length(int e) const { return displacement(e).norm(); }

Eigen::VectorXd PeriodicNetwork::tangent(int e) const {
    Eigen::VectorXd d = displacement(e);
    return d / d.norm();
}

void PeriodicNetwork::check_edge(const Edge& e) const {
    if (e.u < 0 || e.u >= node_count() || e.v < 0 || e.v >= node_count())
        throw InvalidNetwork("edge node index out of range");
    if (static_cast<int>(e.shift.size()) != dimension_)
        throw InvalidNetwork("edge shift has wrong dimension");
    if (!std::isfinite(e.weight) || e.weight < 0.0)
        throw InvalidNetwork("edge weight must be finite and nonnegative");
    double len2 = 0.0;
    for (int i = 0; i < dimension_; ++i) {
        double d = node(e.v)[i] + static_cast<double>(e.shift[static_cast<std::size_t>(i)]) -
                   node(e.u)[i];
        len2 += d * d;
    }
    if (!(len2 > 0.0)) throw InvalidNetwork("edge has zero length");
}

void PeriodicNetwork::validate() const {
    if (dimension_ < 1) throw InvalidNetwork("dimension must be at least 1");
    for (const TorusPoint& p : nodes_)
        if (p.dimension() != dimension_) throw InvalidNetwork("node dimension mismatch");
    for (const Edge& e : edges_) check_edge(e);
}

std::string_view to_string(Mode mode) {
    return mode == Mode::Isotropic ? "isotropic" : "tangential";
}

// --- SymMatrix ---------------------------------------------------------------

std::size_t SymMatrix::index(int i, int j) const {
    if (i > j) std::swap(i, j);
    // Row-major packed upper triangle.
    return static_cast<std::size_t>(i * n_ - i * (i - 1) / 2 + (j - i));
}

SymMatrix SymMatrix::identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::outer(const Eigen::VectorXd& v, double scale) {
    const int n = static_cast<int>(v.size());
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.set(i, j, scale * v[i] * v[j]);
    return m;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw InvalidArgument("matrix must be square");
    const int n = static_cast<int>(a.rows());
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.set(i, j, a(i, j));
    return m;
}

SymMatrix SymMatrix::from_upper(int n, std::span<const double> upper) {
    if (n < 1 || upper.size() != static_cast<std::size_t>(n * (n + 1) / 2))
        throw InvalidArgument("upper triangle has wrong number of entries");
    SymMatrix m(n);
    std::copy(upper.begin(), upper.end(), m.upper_.begin());
    return m;
}

Eigen::MatrixXd SymMatrix::dense() const {
    Eigen::MatrixXd a(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) a(i, j) = (*this)(i, j);
    return a;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double SymMatrix::frobenius() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
}

double SymMatrix::quadratic(const Eigen::VectorXd& p, const Eigen::VectorXd& q) const {
    return p.dot(dense() * q);
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
    if (o.n_ != n_) throw InvalidArgument("dimension mismatch");
    for (std::size_t i = 0; i < upper_.size(); ++i) upper_[i] += o.upper_[i];
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
    if (o.n_ != n_) throw InvalidArgument("dimension mismatch");
    for (std::size_t i = 0; i < upper_.size(); ++i) upper_[i] -= o.upper_[i];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    for (double& x : upper_) x *= s;
    return *this;
}

Spectrum spectrum(const SymMatrix& a) {
    if (a.dim() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.dense());
    return {solver.eigenvalues(), solver.eigenvectors()};
}

bool is_psd(const SymMatrix& a, double rel_tol, double abs_tol) {
    if (a.dim() == 0) return true;
    Spectrum s = spectrum(a);
    double top = std::max(s.values.maxCoeff(), 0.0);
    return s.values.minCoeff() >= -rel_tol * top - abs_tol;
}

double largest_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.cols() != b.cols()) return std::acos(0.0);
    if (a.cols() == 0) return 0.0;
    Eigen::MatrixXd residual = b - a * (a.transpose() * b);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
    double s = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
    return std::asin(std::min(1.0, s));
}

void canonicalize_signs(Eigen::MatrixXd& columns) {
    for (Eigen::Index c = 0; c < columns.cols(); ++c) {
        for (Eigen::Index r = 0; r < columns.rows(); ++r) {
            if (std::abs(columns(r, c)) > 1e-12) {
                if (columns(r, c) < 0) columns.col(c) *= -1.0;
                break;
            }
        }
    }
}

SymMatrix ProjectionMixture::reconstruct() const {
    if (atoms.empty()) return {};
    const int n = static_cast<int>(atoms.front().basis.rows());
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    for (const MixtureAtom& atom : atoms)
        sum += atom.lambda * (atom.basis * atom.basis.transpose());
    return SymMatrix::from_dense(sum / static_cast<double>(k));
}

// --- operations --------------------------------------------------------------

SymMatrix mass_tensor(const NetworkMedium& medium) {
    const PeriodicNetwork& net = medium.network;
    const int n = net.dimension();
    SymMatrix m(n);
    double total = 0.0;
    for (int e = 0; e < net.edge_count(); ++e) {
        if (!net.in_support(e)) continue;
        const double a = net.edge(e).weight;
        if (medium.mode == Mode::Isotropic) {
            total += a * net.length(e);
        } else {
            Eigen::VectorXd d = net.displacement(e);
            m += SymMatrix::outer(d, a / d.norm());
        }
    }
    if (medium.mode == Mode::Isotropic) m = SymMatrix::identity(n) * total;
    return m;
}

namespace {

bool all_zero(const SymMatrix& a) {
    return std::all_of(a.upper().begin(), a.upper().end(), [](double x) { return x == 0.0; });
}

}  // namespace

double realizable_dimension(const SymMatrix& a) {
    if (a.dim() == 0 || all_zero(a)) throw ZeroMatrix();
    Spectrum s = spectrum(a);
    const double top = s.values.maxCoeff();
    const double bottom = s.values.minCoeff();
    if (top <= 0.0 || bottom < -kTolPsdRel * top) throw NotPSD(bottom);
    return a.trace() / top;
}

ProjectionMixture realize_as_mixture(const SymMatrix& a, int k, double tol_mix) {
    const int n = a.dim();
    if (n < 1 || k < 1 || k > n)
        throw InvalidArgument("need 1 <= k <= n (k=" + std::to_string(k) + ", n=" +
                              std::to_string(n) + ")");
    const double tr = a.trace();
    if (std::abs(tr - 1.0) > tol_mix) throw BadTrace(tr);

    Spectrum s = spectrum(a);
    const double top = s.values.maxCoeff();
    if (s.values.minCoeff() < -kTolPsdRel * std::max(top, 0.0)) throw NotPSD(s.values.minCoeff());
    if (top > 1.0 / k + tol_mix) throw NotRealizable(k, top);

    // Work with y = k λ, a point of the hypersimplex {0 <= y_i <= M, Σ y = k M},
    // and peel off extreme points 1_J (|J| = k) greedily.
    std::vector<double> y(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        y[static_cast<std::size_t>(i)] = std::clamp(k * s.values[i], 0.0, 1.0);
        sum += y[static_cast<std::size_t>(i)];
    }
    for (double& v : y) v = std::min(1.0, v * k / sum);

    constexpr double snap = 1e-14;
    ProjectionMixture mix;
    mix.k = k;
    double remaining = 1.0;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int step = 0; step < n && remaining > snap; ++step) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
            return y[static_cast<std::size_t>(i)] > y[static_cast<std::size_t>(j)];
        });
        std::vector<int> chosen(order.begin(), order.begin() + k);
        double mu = remaining;
        for (int i : chosen) mu = std::min(mu, y[static_cast<std::size_t>(i)]);
        if (k < n) mu = std::min(mu, remaining - y[static_cast<std::size_t>(order[k])]);
        if (step == n - 1) mu = remaining;
        if (mu <= 0.0) break;

        std::sort(chosen.begin(), chosen.end());
        MixtureAtom atom;
        atom.lambda = mu;
        atom.basis.resize(n, k);
        for (int c = 0; c < k; ++c) atom.basis.col(c) = s.vectors.col(chosen[static_cast<std::size_t>(c)]);
        mix.atoms.push_back(std::move(atom));

        for (int i : chosen) y[static_cast<std::size_t>(i)] -= mu;
        remaining -= mu;
        for (double& v : y) {
            if (v < snap) v = 0.0;
            if (v > remaining - snap) v = remaining;
        }
    }
    if (remaining > snap && !mix.atoms.empty()) mix.atoms.back().lambda += remaining;
    return mix;
}

Eigen::MatrixXd kernel_basis(const SymMatrix& a, double tol_rank) {
    const int n = a.dim();
    if (all_zero(a)) return Eigen::MatrixXd::Identity(n, n);
    Spectrum s = spectrum(a);
    const double threshold =
        tol_rank * std::max(s.values.maxCoeff(), std::numeric_limits<double>::min());
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
        if (s.values[i] <= threshold) keep.push_back(i);
    Eigen::MatrixXd basis(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
        basis.col(static_cast<Eigen::Index>(c)) = s.vectors.col(keep[c]);
    canonicalize_signs(basis);
    return basis;
}

}  // namespace reticulate
