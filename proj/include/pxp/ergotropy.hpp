#pragma once

// Passive states, bound energy and ergotropy of a half-chain subsystem.

#include "pxp/entanglement.hpp"
#include "pxp/spectra.hpp"

#include <Eigen/Eigenvalues>

#include <numeric>
#include <stdexcept>
#include <vector>

namespace pxp {

/// All energies are shifted so that the subsystem ground state sits at 0.
struct ErgotropyBreakdown {
    double energy = 0.0;       // E = tr(rho H_A) - E_gs
    double ergotropy = 0.0;    // W
    double bound_energy = 0.0; // Q
    double raw_energy = 0.0;   // tr(rho H_A)
};

/// Q = sum_k p_k e_k with p descending and e ascending, ground-shifted.
/// Populations beyond the end of `probs` are zero.
inline double passive_energy(std::vector<double> const& probs, RealVector const& shifted_energies) {
    if (probs.size() > static_cast<std::size_t>(shifted_energies.size()))
        throw std::invalid_argument("passive_energy: more populations than energy levels");
    double q = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) q += probs[k] * shifted_energies[static_cast<Eigen::Index>(k)];
    return q;
}

/// H_A on l = L/2 sites with its spectrum, ready for repeated use.
class SubsystemModel {
public:
    explicit SubsystemModel(int l)
        : sites_(l), hamiltonian_(subsystem_hamiltonian(l)), dense_(hamiltonian_.dense()), spectrum_(dense_eigh(dense_)) {
        shifted_ = spectrum_.values.array() - spectrum_.values[0];
    }

    int sites() const noexcept { return sites_; }
    SparseOperator const& hamiltonian() const noexcept { return hamiltonian_; }
    RealMatrix const& dense_hamiltonian() const noexcept { return dense_; }
    SpectralDecomposition const& spectrum() const noexcept { return spectrum_; }
    double ground_energy() const noexcept { return spectrum_.values[0]; }
    RealVector const& shifted_energies() const noexcept { return shifted_; }

private:
    int sites_;
    SparseOperator hamiltonian_;
    RealMatrix dense_;
    SpectralDecomposition spectrum_;
    RealVector shifted_;
};

/// tr(rho H_A) - E_gs.
inline double subsystem_energy(ReducedDensity const& rho, SubsystemModel const& model) {
    if (static_cast<std::size_t>(rho.rho.rows()) != model.hamiltonian().dim())
        throw std::invalid_argument("subsystem_energy: rho and H_A dimensions differ");
    // tr(rho H) with H real symmetric
    return (rho.rho.real().cwiseProduct(model.dense_hamiltonian())).sum() - model.ground_energy();
}

inline ErgotropyBreakdown ergotropy(ReducedDensity const& rho, SubsystemModel const& model) {
    ErgotropyBreakdown out;
    out.energy = subsystem_energy(rho, model);
    out.raw_energy = out.energy + model.ground_energy();
    auto const spec = entanglement_spectrum(rho);
    out.bound_energy = passive_energy(spec.probabilities, model.shifted_energies());
    out.ergotropy = out.energy - out.bound_energy;
    return out;
}

/// Half-chain ergotropy of a state on the periodic basis.
template <typename Scalar>
ErgotropyBreakdown ergotropy(Bipartition const& half_cut, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& state,
                             SubsystemModel const& model) {
    return ergotropy(reduced_density(half_cut, state), model);
}

template <typename Scalar>
ErgotropyBreakdown ergotropy(ConstrainedBasis const& basis, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& state) {
    SubsystemModel const model(basis.length() / 2);
    return ergotropy(Bipartition(basis, CutGeometry::half_chain(basis.length())), state, model);
}

/// U = sum_n |E_n><E_ent,n|: populations in descending order are sent to
/// H_A levels in ascending order. Ties resolve by index order.
inline ComplexMatrix optimal_unitary(ComplexMatrix const& rho, RealMatrix const& subsystem_hamiltonian_matrix) {
    if (rho.rows() != subsystem_hamiltonian_matrix.rows())
        throw std::invalid_argument("optimal_unitary: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> rho_solver(rho);
    auto const h = dense_eigh(subsystem_hamiltonian_matrix);
    // SelfAdjointEigenSolver sorts ascending; reverse for descending populations
    ComplexMatrix const ent = rho_solver.eigenvectors().rowwise().reverse();
    return h.vectors.cast<Complex>() * ent.adjoint();
}

} // namespace pxp
