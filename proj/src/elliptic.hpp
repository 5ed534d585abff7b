#pragma once

// Sparse discrete form of D lap(u) - c u on the axisymmetric grid, shared by
// the longitudinal and transverse solvers.

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <vector>

#include "cellsim/grid.hpp"

namespace cellsim::detail {

/// Discrete Laplacian over the nodes that carry an equation (Dirichlet wall
/// nodes are eliminated with value zero). Rows are scaled by positive weights
/// so that the operator is symmetric; -W (D lap - diag(c)) is then SPD for
/// c > 0 and can be factorized with sparse Cholesky.
class EllipticSystem {
public:
    EllipticSystem(const Grid& grid, WallConditions walls);

    int unknowns() const { return static_cast<int>(nodes_.size()); }
    /// Grid index of unknown k.
    std::size_t node(int k) const { return nodes_[k]; }
    /// Unknown index of a grid node, -1 for eliminated nodes.
    int unknown(std::size_t node) const { return unknown_of_[node]; }
    double weight(int k) const { return weights_[k]; }

    /// (lap u)_k, unscaled.
    void apply_laplacian(const std::vector<double>& u, std::vector<double>& out) const;

    /// Factorize -W (D lap - diag(c)).
    void factorize(double diffusion, const std::vector<double>& c);

    /// Solve (D lap - diag(c)) x = b using the last factorization.
    std::vector<double> solve(const std::vector<double>& b) const;

private:
    std::vector<std::size_t> nodes_;
    std::vector<int> unknown_of_;
    std::vector<double> weights_;
    // Symmetric -W lap, lower+upper stored.
    Eigen::SparseMatrix<double> neg_weighted_laplacian_;
    Eigen::SparseMatrix<double> lap_;  // unscaled lap
    std::vector<int> diagonal_position_;
    Eigen::SparseMatrix<double> work_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> cholesky_;
    bool analyzed_ = false;
};

}  // namespace cellsim::detail
