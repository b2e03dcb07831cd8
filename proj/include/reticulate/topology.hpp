#pragma once

// Homotopy data of the support of a periodic network: planarization in n=2,
// connected components, the lattice H_Γ ⊂ Z^n of homotopy classes of closed
// paths, and the trivial / quasi-laminate / loopy classification.

#include <vector>

#include <Eigen/Dense>

#include "reticulate/core.hpp"

namespace reticulate {

inline constexpr double kDefaultEpsGeom = 1e-9;

/// Integer lattice spanned by fundamental-cycle classes.
struct CycleLattice {
    int dimension = 0;
    std::vector<IntVec> generators;
    int rank = 0;
    /// Row Hermite normal form of the generators (rank rows).
    std::vector<IntVec> basis;
};

/// Row-style Hermite normal form over exact integers; returns the nonzero rows.
std::vector<IntVec> hermite_normal_form(std::vector<IntVec> rows, int n);

CycleLattice make_lattice(int n, std::vector<IntVec> generators);

/// Orthonormal basis (columns) of the orthogonal complement of the real span of `rows`.
Eigen::MatrixXd orthogonal_complement(const std::vector<IntVec>& rows, int n);

enum class LatticeKind { Trivial, QuasiLaminate, Loopy, Intermediate };

std::string_view to_string(LatticeKind kind);

struct ComponentLattice {
    int component = 0;
    CycleLattice lattice;
};

struct Classification {
    LatticeKind kind = LatticeKind::Trivial;
    /// Primitive direction of the rank-1 lattice (QuasiLaminate only).
    IntVec direction;
    std::vector<ComponentLattice> per_component;
    CycleLattice total;
    /// Orthonormal basis of H_Γ^⊥ as columns.
    Eigen::MatrixXd predicted_kernel;
    /// Some single component has a full-rank lattice.
    bool reticulate = false;
};

/// Inserts nodes at every crossing, merges nodes closer than eps_geom and splits
/// overlapping collinear edges so graph connectivity matches the support set.
/// Edges below the support threshold are dropped. Requires n = 2.
PeriodicNetwork planarize(const PeriodicNetwork& net, double eps_geom = kDefaultEpsGeom);

/// Support-edge indices of each connected component, ordered by smallest edge index.
std::vector<std::vector<int>> component_edges(const PeriodicNetwork& net);

/// Edge-induced subnetwork; nodes keep their relative order.
PeriodicNetwork subnetwork(const PeriodicNetwork& net, const std::vector<int>& edge_ids);

/// Connected components of the support; isolated nodes are dropped.
std::vector<PeriodicNetwork> components(const PeriodicNetwork& net);

/// Fundamental-cycle classes of every component, concatenated, with HNF basis.
CycleLattice cycle_lattice(const PeriodicNetwork& net);

Classification classify(const PeriodicNetwork& net);

}  // namespace reticulate
