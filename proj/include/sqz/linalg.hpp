#ifndef SQZ_LINALG_HPP
#define SQZ_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sqz/fock.hpp"

namespace sqz {

/// exp(i * t * H) for Hermitian H, via its eigendecomposition. The input is
/// symmetrized first so round-off asymmetry cannot leak into the result.
inline Matrix exp_i_hermitian(const Matrix& h, double t = 1.0)
{
    if (h.rows() != h.cols()) {
        throw std::invalid_argument("exp_i_hermitian: matrix is not square");
    }
    if (h.rows() == 0) {
        return h;
    }
    const Matrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("exp_i_hermitian: eigendecomposition failed");
    }
    const Eigen::VectorXcd phases =
        (eig.eigenvalues().cast<cplx>() * cplx(0.0, t)).array().exp().matrix();
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

/// exp(G) for anti-Hermitian G (G = iH).
inline Matrix exp_anti_hermitian(const Matrix& g) { return exp_i_hermitian(cplx(0.0, -1.0) * g); }

/// exp(G) for anti-Hermitian G that is block diagonal with respect to the
/// given partition of basis indices. Entries between different blocks are
/// exactly zero in the result.
inline Matrix exp_anti_hermitian_blocked(const Matrix& g, const std::vector<std::vector<Eigen::Index>>& blocks)
{
    Matrix out = Matrix::Zero(g.rows(), g.cols());
    for (const auto& idx : blocks) {
        const auto n = static_cast<Eigen::Index>(idx.size());
        Matrix sub(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                sub(i, j) = g(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
            }
        }
        const Matrix e = exp_anti_hermitian(sub);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                out(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]) = e(i, j);
            }
        }
    }
    return out;
}

/// Von Neumann entropy in bits. Eigenvalues are clamped to [0, 1] and those
/// below `cutoff` are dropped (0 log 0 = 0).
inline double von_neumann_entropy_bits(const Matrix& rho, double cutoff = 1e-14)
{
    const Matrix sym = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("von_neumann_entropy_bits: eigendecomposition failed");
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        const double lambda = std::clamp(eig.eigenvalues()[i], 0.0, 1.0);
        if (lambda >= cutoff) {
            s -= lambda * std::log2(lambda);
        }
    }
    return s;
}

} // namespace sqz

#endif
