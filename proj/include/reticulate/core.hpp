#pragma once

// Domain types for conductive media carried by periodic networks on the flat
// torus T^n = R^n / Z^n, plus the small symmetric-matrix toolkit the rest of
// the library is built on.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "reticulate/errors.hpp"

namespace reticulate {

using IntVec = std::vector<std::int64_t>;

/// Edges whose weight falls below this value are not part of the support.
inline constexpr double kSupportThreshold = 1e-12;
/// PSD checks accept eigenvalues down to -kTolPsdRel * lambda_max.
inline constexpr double kTolPsdRel = 1e-10;
inline constexpr double kTolMix = 1e-9;
inline constexpr double kDefaultTolRank = 1e-8;

/// A point of the flat torus; coordinates are reduced into [0,1) on construction.
class TorusPoint {
public:
    TorusPoint() = default;
    explicit TorusPoint(std::vector<double> coords);
    TorusPoint(std::initializer_list<double> coords)
        : TorusPoint(std::vector<double>(coords)) {}

    int dimension() const { return static_cast<int>(coords_.size()); }
    double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& coords() const { return coords_; }
    Eigen::VectorXd vec() const;

    friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

private:
    std::vector<double> coords_;
};

/// Reduce a real number into [0,1).
double wrap_unit(double x);

/// Straight edge from node u to the translate of node v by `shift`.
struct Edge {
    int u = 0;
    int v = 0;
    IntVec shift;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Nodes on T^n joined by weighted straight edges with integer crossing vectors.
///
/// The lifted displacement of edge e is d_e = x_v + z_e - x_u, where x_u, x_v are
/// the node representatives in [0,1)^n and z_e is the crossing vector. Every edge
/// must have |d_e| > 0.
class PeriodicNetwork {
public:
    explicit PeriodicNetwork(int dimension = 2);
    PeriodicNetwork(int dimension, std::vector<TorusPoint> nodes, std::vector<Edge> edges);

    int add_node(TorusPoint p);
    int add_node(std::initializer_list<double> coords) { return add_node(TorusPoint(coords)); }
    int add_edge(int u, int v, IntVec shift, double weight = 1.0);

    int dimension() const { return dimension_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    bool empty() const { return edges_.empty(); }

    const std::vector<TorusPoint>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const TorusPoint& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

    void set_weight(int e, double w);
    void scale_weights(double factor);

    Eigen::VectorXd displacement(int e) const;
    double length(int e) const;
    Eigen::VectorXd tangent(int e) const;
    bool in_support(int e) const { return edge(e).weight >= kSupportThreshold; }

    /// Throws InvalidNetwork if any invariant is violated.
    void validate() const;

    friend bool operator==(const PeriodicNetwork&, const PeriodicNetwork&) = default;

private:
    void check_edge(const Edge& e) const;

    int dimension_;
    std::vector<TorusPoint> nodes_;
    std::vector<Edge> edges_;
};

enum class Mode { Isotropic, Tangential };

std::string_view to_string(Mode mode);

/// dθ = σ a dH^1 on the support of the network, with σ = I (isotropic) or
/// σ = T⊗T (tangential) on each edge.
struct NetworkMedium {
    PeriodicNetwork network;
    Mode mode = Mode::Tangential;
};

/// Symmetric n×n matrix; only the upper triangle is stored.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n) : n_(n), upper_(static_cast<std::size_t>(n * (n + 1) / 2), 0.0) {}

    static SymMatrix identity(int n);
    static SymMatrix outer(const Eigen::VectorXd& v, double scale = 1.0);
    /// Uses the upper triangle of `m`.
    static SymMatrix from_dense(const Eigen::MatrixXd& m);
    /// Row-major upper triangle: a11, a12, ..., a1n, a22, ...
    static SymMatrix from_upper(int n, std::span<const double> upper);

    int dim() const { return n_; }
    double operator()(int i, int j) const { return upper_[index(i, j)]; }
    void set(int i, int j, double v) { upper_[index(i, j)] = v; }
    void add(int i, int j, double v) { upper_[index(i, j)] += v; }
    const std::vector<double>& upper() const { return upper_; }

    Eigen::MatrixXd dense() const;
    double trace() const;
    double frobenius() const;
    double quadratic(const Eigen::VectorXd& p, const Eigen::VectorXd& q) const;

    SymMatrix& operator+=(const SymMatrix& o);
    SymMatrix& operator-=(const SymMatrix& o);
    SymMatrix& operator*=(double s);
    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
    friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

private:
    std::size_t index(int i, int j) const;

    int n_ = 0;
    std::vector<double> upper_;
};

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
struct Spectrum {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

Spectrum spectrum(const SymMatrix& a);

/// True when every eigenvalue is at least -rel_tol * max(lambda_max, 0) - abs_tol.
bool is_psd(const SymMatrix& a, double rel_tol = kTolPsdRel, double abs_tol = 0.0);

/// Largest principal angle (radians) between the column spans of two matrices
/// with orthonormal columns. Spans of different dimension give pi/2.
double largest_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct MixtureAtom {
    double lambda = 0.0;
    /// n×k matrix with orthonormal columns spanning the subspace.
    Eigen::MatrixXd basis;
};

/// Convex combination (1/k) Σ λ_i P_{τ_i} of scaled k-plane projections.
struct ProjectionMixture {
    int k = 1;
    std::vector<MixtureAtom> atoms;

    SymMatrix reconstruct() const;
};

/// θ(T^n): Σ a ℓ I in isotropic mode, Σ a ℓ T⊗T in tangential mode.
SymMatrix mass_tensor(const NetworkMedium& medium);

/// tr(A) / λ_max(A) for nonzero PSD A.
double realizable_dimension(const SymMatrix& a);

/// Writes a trace-1 PSD matrix as a mixture of scaled coordinate k-planes of its
/// eigenbasis. Throws NotRealizable when λ_max > 1/k + tol_mix.
ProjectionMixture realize_as_mixture(const SymMatrix& a, int k, double tol_mix = kTolMix);

/// Orthonormal basis (as columns) of the eigenspaces with eigenvalue at most
/// tol_rank * max(λ_max, floor). The zero matrix yields the standard basis.
Eigen::MatrixXd kernel_basis(const SymMatrix& a, double tol_rank = kDefaultTolRank);

/// Flip each column so its first entry of magnitude > 1e-12 is positive.
void canonicalize_signs(Eigen::MatrixXd& columns);

}  // namespace reticulate
