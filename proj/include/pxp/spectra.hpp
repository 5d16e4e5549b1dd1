#pragma once

// Dense spectral decomposition and degenerate-shell extraction.

#include "pxp/operators.hpp"

#include <lapacke.h>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace pxp {

/// Eigenvalues ascending; eigenvectors are the matching orthonormal columns.
struct SpectralDecomposition {
    RealVector values;
    RealMatrix vectors;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(values.size()); }
};

inline constexpr double kHermiticityTolerance = 1e-12;
inline constexpr double kDefaultShellTolerance = 1e-10;

/// Full decomposition of a real symmetric matrix (LAPACK dsyevd).
inline SpectralDecomposition dense_eigh(RealMatrix matrix) {
    if (matrix.rows() != matrix.cols()) throw std::invalid_argument("dense_eigh: matrix must be square");
    if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > kHermiticityTolerance)
        throw std::invalid_argument("dense_eigh: matrix is not Hermitian");
    auto const n = static_cast<lapack_int>(matrix.rows());
    SpectralDecomposition dec;
    dec.values.resize(n);
    if (n > 0) {
        lapack_int const info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, matrix.data(), n, dec.values.data());
        if (info != 0) throw std::runtime_error("dense_eigh: dsyevd failed with info " + std::to_string(info));
    }
    dec.vectors = std::move(matrix);
    return dec;
}

inline SpectralDecomposition dense_eigh(SparseOperator const& op) {
    if (!op.hermitian) throw std::invalid_argument("dense_eigh: operator not flagged Hermitian");
    return dense_eigh(op.dense());
}

/// Indices of eigenvalues with |lambda| < tol (strict).
inline std::vector<std::size_t> zero_energy_shell(SpectralDecomposition const& dec,
                                                  double tol = kDefaultShellTolerance) {
    std::vector<std::size_t> shell;
    for (Eigen::Index i = 0; i < dec.values.size(); ++i)
        if (std::abs(dec.values[i]) < tol) shell.push_back(static_cast<std::size_t>(i));
    return shell;
}

/// Verifies that the zero shell does not change for tolerances in
/// [1e-12, 1e-8]; throws with a diagnostic otherwise.
inline void check_shell_gap(SpectralDecomposition const& dec) {
    auto const tight = zero_energy_shell(dec, 1e-12).size();
    auto const loose = zero_energy_shell(dec, 1e-8).size();
    if (tight != loose)
        throw std::runtime_error("zero-energy shell is not gapped: " + std::to_string(tight) +
                                 " states below 1e-12 but " + std::to_string(loose) + " below 1e-8");
}

/// Shell eigenvectors as columns.
inline RealMatrix shell_vectors(SpectralDecomposition const& dec, std::vector<std::size_t> const& shell) {
    RealMatrix out(dec.vectors.rows(), static_cast<Eigen::Index>(shell.size()));
    for (std::size_t k = 0; k < shell.size(); ++k)
        out.col(static_cast<Eigen::Index>(k)) = dec.vectors.col(static_cast<Eigen::Index>(shell[k]));
    return out;
}

inline double ground_energy(SparseOperator const& op) { return dense_eigh(op).values[0]; }

inline double ground_energy(DiagonalOperator const& op) { return op.values.minCoeff(); }

} // namespace pxp
