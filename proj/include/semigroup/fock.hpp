// fock.hpp — Truncated second-quantized model: N=0 and N=1 sectors, product-state
// embedding and reduction to the one-particle picture.
//
// Only the zero- and one-particle sectors are ever materialized. In the micro-first
// factorization the N=1 sector is H¹ ⊗ H_bath (dimension d_s·d_b), the N=0 sector is
// H_bath (dimension d_b), and the restricted annihilator a_f is the map ⟨f| ⊗ I from
// N=1 to N=0. Statistics (bose/fermi) is immaterial here and not modeled.

#pragma once

#include <memory>
#include <vector>

#include "semigroup/algebra.hpp"

namespace semigroup {

// One term a†_f a_g ⊗ B_fg of the interaction V. Terms with equal (f, g) add up.
struct CouplingTerm {
    Index f = 0;
    Index g = 0;
    Matrix b;
};

// H = Σ_f E_f a†_f a_f + H_m + Σ a†_f a_g ⊗ B_fg. Validated on construction:
// H_m Hermitian and B_fg = B_gf† to 1e-12, so V is Hermitian and conserves N.
class SystemModel {
public:
    SystemModel(std::vector<double> micro_energies, Matrix h_m, std::vector<CouplingTerm> coupling_terms);

    Index d_s() const noexcept { return static_cast<Index>(micro_energies_.size()); }
    Index d_b() const noexcept { return h_m_.rows(); }

    const std::vector<double>& micro_energies() const noexcept { return micro_energies_; }
    const Matrix& h_m() const noexcept { return h_m_; }
    const std::vector<CouplingTerm>& coupling_terms() const noexcept { return coupling_terms_; }

    // Eigenpairs (E_λ, |λ⟩) of H_m, eigenvector phases fixed (first nonzero entry real positive).
    const HermitianSpectrum& bath_spectrum() const noexcept { return *bath_spectrum_; }

    // Σ of all B matrices attached to (f, g); zero when absent.
    Matrix coupling_block(Index f, Index g) const;

    // True when some B_fg has a nonzero entry.
    bool has_coupling() const;

    // Same model with every B_fg multiplied by g.
    SystemModel scaled(double g) const;

private:
    std::vector<double> micro_energies_;
    Matrix h_m_;
    std::vector<CouplingTerm> coupling_terms_;
    std::shared_ptr<const HermitianSpectrum> bath_spectrum_;
};

// Sector restrictions of the Fock-space operators.
struct SectorOperators {
    Index d_s = 0;
    Index d_b = 0;
    std::vector<Matrix> a_maps;  // a_f : N=1 → N=0, each d_b × (d_s·d_b)
    Matrix h0;                   // H restricted to N=0 (= H_m)
    Matrix h1;                   // H restricted to N=1
    Matrix h1_free;              // H₀ + H_m restricted to N=1 (no coupling)
    Matrix v1;                   // V restricted to N=1 (V vanishes on N=0)

    // Cached spectral decomposition of (h0, h1) for sector-crossing resolvents.
    std::shared_ptr<const ShiftedSylvesterSolver> crossing_solver;

    Matrix a_dagger(Index f) const { return a_maps.at(static_cast<std::size_t>(f)).adjoint(); }
};

SectorOperators build_sectors(const SystemModel& model);

// exp(−βH_m)/Z
Matrix gibbs_state(const Matrix& h_m, double beta);

// Bath statistical operator ρᵐ with its eigen-decomposition ρᵐ = Σ π_ξ |ξ⟩⟨ξ|.
class BathState {
public:
    // Gibbs state; the ξ basis is the H_m eigenbasis, so ρᵐ commutes with H_m exactly.
    static BathState gibbs(const SystemModel& model, double beta);

    // Arbitrary PSD trace-one ρᵐ (tolerance 1e-10). Eigenvectors are ordered by
    // decreasing weight; ties are broken lexicographically on the phase-fixed vectors.
    static BathState from_density(const SystemModel& model, const Matrix& rho_m);

    const Matrix& rho_m() const noexcept { return rho_m_; }
    const RealVector& weights() const noexcept { return weights_; }
    const Matrix& eigenvectors() const noexcept { return eigenvectors_; }
    // ‖[ρᵐ, H_m]‖ (max-norm); zero for equilibrium states.
    double commutator_defect() const noexcept { return commutator_defect_; }
    Index dim() const noexcept { return rho_m_.rows(); }

private:
    BathState(Matrix rho, RealVector weights, Matrix vectors, double defect);

    Matrix rho_m_;
    RealVector weights_;
    Matrix eigenvectors_;
    double commutator_defect_ = 0.0;
};

// One-particle statistical operator ρ⁽¹⁾. Subcollections may carry trace < 1.
struct MicroState {
    Matrix rho;

    // Validates Hermiticity (tol), positivity (min eig ≥ −tol) and 0 < Tr ≤ 1 + tol.
    static MicroState from_matrix(const Matrix& rho, double tol = 1e-10);
    static MicroState from_ket(const Vector& ket);

    Index dim() const noexcept { return rho.rows(); }
};

// ρ = Σ_gf a†_g ρᵐ a_f ρ⁽¹⁾_gf, i.e. ρ⁽¹⁾ ⊗ ρᵐ in micro-first order.
Matrix embed_product_state(const MicroState& rho1, const BathState& bath);

// ρ⁽¹⁾_gf = Tr(a†_f a_g ρ) evaluated with the sector annihilators.
MicroState reduce(const Matrix& rho_full, const SectorOperators& sec);

// Fix the global phase of each column: first entry with modulus > tol made real positive.
void fix_phases(Matrix& vectors, double tol = 1e-12);

} // namespace semigroup
