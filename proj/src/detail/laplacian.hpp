#pragma once

// Weighted graph Laplacian with optional Dirichlet (pinned) nodes, solved by
// Jacobi-preconditioned conjugate gradients. Components without a pinned node
// make the operator singular; their constant kernel is projected out of the
// right-hand side and of the iterates.

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace reticulate::detail {

struct GraphEdge {
    int a = 0;
    int b = 0;
    double conductance = 0.0;
};

struct SolveResult {
    Eigen::VectorXd x;
    double residual = 0.0;  // ||b - Lx|| / ||b|| after kernel projection
    int iterations = 0;
};

class LaplacianSystem {
public:
    /// Self-loops are ignored. Pinned nodes are held at zero.
    LaplacianSystem(int node_count, const std::vector<GraphEdge>& edges, std::vector<bool> pinned = {});

    int node_count() const { return node_count_; }
    /// Solves L x = b over the free nodes; entries of b on pinned nodes are ignored
    /// and x is zero there. Floating components come back with zero mean.
    SolveResult solve(const Eigen::VectorXd& b, double tol, int max_iterations) const;

    /// Component id of a node in the graph of free-free edges (-1 for pinned nodes).
    int component(int node) const { return component_[static_cast<std::size_t>(node)]; }
    int component_count() const { return static_cast<int>(grounded_.size()); }
    bool grounded(int component) const { return grounded_[static_cast<std::size_t>(component)]; }

    /// Removes the per-component mean on components with no pinned neighbour.
    void project(Eigen::VectorXd& free_values) const;

private:
    int node_count_;
    std::vector<int> free_index_;  // node -> unknown index or -1
    std::vector<int> node_of_free_;
    std::vector<int> component_;
    std::vector<char> grounded_;
    std::vector<int> free_component_;
    std::vector<int> component_size_;
    Eigen::SparseMatrix<double> matrix_;
    Eigen::VectorXd inv_diag_;
};

}  // namespace reticulate::detail
