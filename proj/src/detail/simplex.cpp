#include "detail/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace reticulate::detail {

namespace {

class Tableau {
public:
    // Rows 0..m-1 are constraints, row m is the objective (reduced costs);
    // column `cols` holds the right-hand side.
    Tableau(int m, int cols) : t_(Eigen::MatrixXd::Zero(m + 1, cols + 1)), basis_(static_cast<std::size_t>(m)), m_(m), cols_(cols) {}

    double& at(int r, int c) { return t_(r, c); }
    double rhs(int r) const { return t_(r, cols_); }
    int& basis(int r) { return basis_[static_cast<std::size_t>(r)]; }
    int rows() const { return m_; }

    void pivot(int r, int c) {
        t_.row(r) /= t_(r, c);
        for (int i = 0; i <= m_; ++i) {
            if (i == r || t_(i, c) == 0.0) continue;
            t_.row(i) -= t_(i, c) * t_.row(r);
        }
        basis_[static_cast<std::size_t>(r)] = c;
    }

    // Bland's rule over the first `active` columns. Returns false if unbounded.
    bool optimize(int active, double eps) {
        while (true) {
            int enter = -1;
            for (int j = 0; j < active; ++j) {
                if (t_(m_, j) < -eps) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                if (t_(i, enter) <= eps) continue;
                const double ratio = t_(i, cols_) / t_(i, enter);
                if (ratio < best - eps ||
                    (std::abs(ratio - best) <= eps && leave >= 0 && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }

    void set_objective(const Eigen::VectorXd& c) {
        t_.row(m_).setZero();
        t_.row(m_).head(c.size()) = c.transpose();
        for (int i = 0; i < m_; ++i) {
            const int bcol = basis_[static_cast<std::size_t>(i)];
            if (t_(m_, bcol) != 0.0) t_.row(m_) -= t_(m_, bcol) * t_.row(i);
        }
    }

    Eigen::MatrixXd& data() { return t_; }

private:
    Eigen::MatrixXd t_;
    std::vector<int> basis_;
    int m_;
    int cols_;
};

}  // namespace

LpResult solve_standard_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b_in, const Eigen::VectorXd& c, double eps) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    Eigen::MatrixXd a = A;
    Eigen::VectorXd b = b_in;
    for (int i = 0; i < m; ++i) {
        if (b[i] < 0) {
            a.row(i) *= -1.0;
            b[i] = -b[i];
        }
    }

    // Phase 1: artificial variables n..n+m-1.
    Tableau tab(m, n + m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) tab.at(i, j) = a(i, j);
        tab.at(i, n + i) = 1.0;
        tab.at(i, n + m) = b[i];
        tab.basis(i) = n + i;
    }
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
    phase1.tail(m).setOnes();
    tab.set_objective(phase1);
    tab.optimize(n + m, eps);

    LpResult result;
    if (-tab.at(m, n + m) > 1e-9 * std::max(1.0, b.lpNorm<Eigen::Infinity>())) {
        result.status = LpStatus::Infeasible;
        return result;
    }
    // Drive artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
        if (tab.basis(i) < n) continue;
        for (int j = 0; j < n; ++j) {
            if (std::abs(tab.at(i, j)) > 1e-9) {
                tab.pivot(i, j);
                break;
            }
        }
    }
    // Artificials still basic sit on redundant rows; phase 2 never lets an
    // artificial column enter.
    Eigen::VectorXd full_c = Eigen::VectorXd::Zero(n + m);
    full_c.head(n) = c;
    tab.set_objective(full_c);
    if (!tab.optimize(n, eps)) {
        result.status = LpStatus::Unbounded;
        return result;
    }
    result.status = LpStatus::Optimal;
    result.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
        if (tab.basis(i) < n) result.x[tab.basis(i)] = tab.rhs(i);
    result.objective = c.dot(result.x);
    return result;
}

}  // namespace reticulate::detail
