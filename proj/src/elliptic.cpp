#include "elliptic.hpp"

#include <stdexcept>

namespace cellsim::detail {

EllipticSystem::EllipticSystem(const Grid& g, WallConditions walls)
    : unknown_of_(g.size(), -1) {
    const bool neumann_discs = walls.discs == WallMode::Nondepolarizing;
    const bool neumann_side = walls.side == WallMode::Nondepolarizing;
    const auto carries_equation = [&](int i, int j) {
        const bool disc = i == 0 || i == g.nz - 1;
        const bool side = j == g.nr - 1;
        return !(disc && !neumann_discs) && !(side && !neumann_side);
    };

    for (int i = 0; i < g.nz; ++i) {
        for (int j = 0; j < g.nr; ++j) {
            if (!carries_equation(i, j)) continue;
            unknown_of_[g.index(i, j)] = static_cast<int>(nodes_.size());
            nodes_.push_back(g.index(i, j));
            const double wz = (i == 0 || i == g.nz - 1) ? 0.5 : 1.0;
            double wr = g.r(j);
            if (j == 0) wr = g.dr / 8.0;
            if (j == g.nr - 1) wr = 0.5 * (g.r(j) - 0.5 * g.dr);
            weights_.push_back(wz * wr);
        }
    }

    const double idz2 = 1.0 / (g.dz * g.dz);
    const double idr2 = 1.0 / (g.dr * g.dr);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(nodes_.size() * 5);
    const auto couple = [&](int row, int i, int j, double coefficient) {
        const int col = unknown_of_[g.index(i, j)];
        if (col >= 0) entries.emplace_back(row, col, coefficient);
    };
    for (int k = 0; k < unknowns(); ++k) {
        const int i = static_cast<int>(nodes_[k] / g.nr);
        const int j = static_cast<int>(nodes_[k] % g.nr);
        double diag = 0.0;
        // z direction, mirrored ghost on Neumann discs
        if (i == 0) {
            couple(k, 1, j, 2.0 * idz2);
        } else if (i == g.nz - 1) {
            couple(k, i - 1, j, 2.0 * idz2);
        } else {
            couple(k, i - 1, j, idz2);
            couple(k, i + 1, j, idz2);
        }
        diag -= 2.0 * idz2;
        // r direction
        if (j == 0) {
            couple(k, i, 1, 4.0 * idr2);
            diag -= 4.0 * idr2;
        } else if (j == g.nr - 1) {
            couple(k, i, j - 1, 2.0 * idr2);
            diag -= 2.0 * idr2;
        } else {
            const double drift = 1.0 / (2.0 * g.r(j) * g.dr);
            couple(k, i, j - 1, idr2 - drift);
            couple(k, i, j + 1, idr2 + drift);
            diag -= 2.0 * idr2;
        }
        entries.emplace_back(k, k, diag);
    }
    lap_.resize(unknowns(), unknowns());
    lap_.setFromTriplets(entries.begin(), entries.end());
    lap_.makeCompressed();

    for (auto& e : entries) e = Eigen::Triplet<double>(e.row(), e.col(), -weights_[e.row()] * e.value());
    neg_weighted_laplacian_.resize(unknowns(), unknowns());
    neg_weighted_laplacian_.setFromTriplets(entries.begin(), entries.end());
    neg_weighted_laplacian_.makeCompressed();

    diagonal_position_.assign(unknowns(), -1);
    for (int col = 0; col < neg_weighted_laplacian_.outerSize(); ++col) {
        for (int p = neg_weighted_laplacian_.outerIndexPtr()[col];
             p < neg_weighted_laplacian_.outerIndexPtr()[col + 1]; ++p) {
            if (neg_weighted_laplacian_.innerIndexPtr()[p] == col) diagonal_position_[col] = p;
        }
    }
    work_ = neg_weighted_laplacian_;
}

void EllipticSystem::apply_laplacian(const std::vector<double>& u, std::vector<double>& out) const {
    Eigen::Map<const Eigen::VectorXd> x(u.data(), unknowns());
    out.resize(u.size());
    Eigen::Map<Eigen::VectorXd> y(out.data(), unknowns());
    y = lap_ * x;
}

void EllipticSystem::factorize(double diffusion, const std::vector<double>& c) {
    const auto nnz = neg_weighted_laplacian_.nonZeros();
    const double* base = neg_weighted_laplacian_.valuePtr();
    double* values = work_.valuePtr();
    for (Eigen::Index p = 0; p < nnz; ++p) values[p] = diffusion * base[p];
    for (int k = 0; k < unknowns(); ++k) values[diagonal_position_[k]] += weights_[k] * c[k];
    if (!analyzed_) {
        cholesky_.analyzePattern(work_);
        analyzed_ = true;
    }
    cholesky_.factorize(work_);
    if (cholesky_.info() != Eigen::Success) {
        throw std::runtime_error("sparse Cholesky factorization failed");
    }
}

std::vector<double> EllipticSystem::solve(const std::vector<double>& b) const {
    Eigen::VectorXd rhs(unknowns());
    for (int k = 0; k < unknowns(); ++k) rhs[k] = -weights_[k] * b[k];
    const Eigen::VectorXd x = cholesky_.solve(rhs);
    return {x.data(), x.data() + x.size()};
}

}  // namespace cellsim::detail
