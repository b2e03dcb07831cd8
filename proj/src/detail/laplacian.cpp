#include "detail/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reticulate::detail {

LaplacianSystem::LaplacianSystem(int node_count, const std::vector<GraphEdge>& edges, std::vector<bool> pinned)
    : node_count_(node_count) {
    if (pinned.empty()) pinned.assign(static_cast<std::size_t>(node_count), false);
    free_index_.assign(static_cast<std::size_t>(node_count), -1);
    for (int i = 0; i < node_count; ++i) {
        if (pinned[static_cast<std::size_t>(i)]) continue;
        free_index_[static_cast<std::size_t>(i)] = static_cast<int>(node_of_free_.size());
        node_of_free_.push_back(i);
    }
    const int m = static_cast<int>(node_of_free_.size());

    std::vector<int> parent(static_cast<std::size_t>(m));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    std::vector<char> touches_pin(static_cast<std::size_t>(m), 0);

    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    for (const GraphEdge& e : edges) {
        if (e.a == e.b || e.conductance == 0.0) continue;
        const int fa = free_index_[static_cast<std::size_t>(e.a)];
        const int fb = free_index_[static_cast<std::size_t>(e.b)];
        if (fa >= 0) diag[fa] += e.conductance;
        if (fb >= 0) diag[fb] += e.conductance;
        if (fa >= 0 && fb >= 0) {
            triplets.emplace_back(fa, fb, -e.conductance);
            triplets.emplace_back(fb, fa, -e.conductance);
            const int ra = find(fa);
            const int rb = find(fb);
            if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
        } else if (fa >= 0) {
            touches_pin[static_cast<std::size_t>(fa)] = 1;
        } else if (fb >= 0) {
            touches_pin[static_cast<std::size_t>(fb)] = 1;
        }
    }
    for (int i = 0; i < m; ++i) triplets.emplace_back(i, i, diag[i]);
    matrix_.resize(m, m);
    matrix_.setFromTriplets(triplets.begin(), triplets.end());

    inv_diag_.resize(m);
    for (int i = 0; i < m; ++i) inv_diag_[i] = diag[i] > 0.0 ? 1.0 / diag[i] : 0.0;

    component_.assign(static_cast<std::size_t>(node_count), -1);
    free_component_.assign(static_cast<std::size_t>(m), -1);
    std::vector<int> id_of_root(static_cast<std::size_t>(m), -1);
    for (int i = 0; i < m; ++i) {
        const int r = find(i);
        if (id_of_root[static_cast<std::size_t>(r)] < 0) {
            id_of_root[static_cast<std::size_t>(r)] = static_cast<int>(grounded_.size());
            grounded_.push_back(0);
            component_size_.push_back(0);
        }
        const int c = id_of_root[static_cast<std::size_t>(r)];
        free_component_[static_cast<std::size_t>(i)] = c;
        component_[static_cast<std::size_t>(node_of_free_[static_cast<std::size_t>(i)])] = c;
        component_size_[static_cast<std::size_t>(c)] += 1;
        if (touches_pin[static_cast<std::size_t>(i)]) grounded_[static_cast<std::size_t>(c)] = 1;
    }
}

void LaplacianSystem::project(Eigen::VectorXd& v) const {
    std::vector<double> sums(grounded_.size(), 0.0);
    for (Eigen::Index i = 0; i < v.size(); ++i) sums[static_cast<std::size_t>(free_component_[static_cast<std::size_t>(i)])] += v[i];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const auto c = static_cast<std::size_t>(free_component_[static_cast<std::size_t>(i)]);
        if (!grounded_[c]) v[i] -= sums[c] / component_size_[c];
    }
}

SolveResult LaplacianSystem::solve(const Eigen::VectorXd& b_full, double tol, int max_iterations) const {
    const auto m = static_cast<Eigen::Index>(node_of_free_.size());
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) b[i] = b_full[node_of_free_[static_cast<std::size_t>(i)]];
    project(b);

    SolveResult result;
    result.x = Eigen::VectorXd::Zero(node_count_);
    const double bnorm = b.norm();
    if (m == 0 || bnorm == 0.0) return result;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd r = b;
    double rel = 1.0;
    int it = 0;
    // Restarted PCG: each restart recomputes the true residual.
    while (it < max_iterations && rel > tol) {
        Eigen::VectorXd z = inv_diag_.cwiseProduct(r);
        project(z);
        Eigen::VectorXd p = z;
        double rz = r.dot(z);
        while (it < max_iterations) {
            ++it;
            Eigen::VectorXd ap = matrix_ * p;
            const double pap = p.dot(ap);
            if (!(pap > 0.0)) break;
            const double alpha = rz / pap;
            x += alpha * p;
            r -= alpha * ap;
            if (r.norm() <= 0.5 * tol * bnorm) break;
            z = inv_diag_.cwiseProduct(r);
            project(z);
            const double rz_next = r.dot(z);
            p = z + (rz_next / rz) * p;
            rz = rz_next;
        }
        project(x);
        r = b - matrix_ * x;
        project(r);
        rel = r.norm() / bnorm;
    }
    result.residual = rel;
    result.iterations = it;
    for (Eigen::Index i = 0; i < m; ++i) result.x[node_of_free_[static_cast<std::size_t>(i)]] = x[i];
    return result;
}

}  // namespace reticulate::detail
