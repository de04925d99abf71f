// tmatrix.hpp — Superoperator resolvents and T-blocks on the zero-particle sector
//
// Superoperators act on sector-crossing maps Y : N=1 → N=0 (d_b × d_s·d_b):
//   𝓗Y = i(h_m·Y − Y·h1),  𝓗₀ likewise with h1_free,  𝓥Y = i[V,Y] = −i·Y·v1
// (V vanishes on N=0). The T-superoperator is 𝒯(z) = 𝓥 + 𝓥(z−𝓗)⁻¹𝓥 and the block
// T^k_h(z) = (𝒯(z)a_k)·a†_h is a d_b × d_b operator on the bath.

#pragma once

#include <vector>

#include "semigroup/fock.hpp"

namespace semigroup {

// Regularized spectral point. Evaluations for mode k sit at z = −i·E_k + η.
struct SpectralPoint {
    cplx z;
    double eta = 0.0;

    // z with η = Re z; throws DomainError unless η exceeds the resonance guard.
    static SpectralPoint from_z(cplx z);
    static SpectralPoint for_energy(double energy, double eta);
    SpectralPoint conjugate() const { return from_z(std::conj(z)); }
};

struct TBlock {
    Index k = 0;
    Index h = 0;
    SpectralPoint point;
    Matrix matrix;  // d_b × d_b
};

// (𝒯(z)a_k) as a d_b × (d_s·d_b) map.
Matrix t_apply(const SectorOperators& sec, const SpectralPoint& p, Index k);

// (𝒯(z)a†_k) as a (d_s·d_b) × d_b map, computed with the N=0 → N=1 resolvent.
Matrix t_apply_adjoint(const SectorOperators& sec, const SpectralPoint& p, Index k);

TBlock t_block(const SectorOperators& sec, const SpectralPoint& p, Index k, Index h);

// a_h·(𝒯(z*)a†_k): equals T^k_h(z)† exactly.
Matrix t_block_adjoint_form(const SectorOperators& sec, const SpectralPoint& p, Index k, Index h);

// Column block h of a t_apply result.
Matrix block_of(const Matrix& t_map, Index h, Index d_b);

// table[k][h] = T^k_h(z) at one spectral point.
std::vector<std::vector<Matrix>> t_block_table(const SectorOperators& sec, const SpectralPoint& p);

// Dense check of (z−𝓗)⁻¹ = (z−𝓗₀)⁻¹[1 + 𝓥(z−𝓗)⁻¹] (first) and
// (z−𝓗)⁻¹ = [1 + (z−𝓗)⁻¹𝓥](z−𝓗₀)⁻¹ (second) on the crossing space, max-norm.
struct ResolventResidual {
    double first = 0.0;
    double second = 0.0;
};

ResolventResidual verify_resolvent_identity(const SectorOperators& sec, const SpectralPoint& p);

// Dense crossing-space superoperators (column stacking), used by the identity check.
Matrix crossing_hamiltonian_superop(const SectorOperators& sec, bool free);
Matrix crossing_coupling_superop(const SectorOperators& sec);

// ----------------------------------------------------------- ring lattice --

// Micro modes are plane waves u_f(x) = e^{i2πfx/Nx}/√Nx on a ring of nx sites
// (d_s = nx). bath_shift is the bath's part of the lattice translation; the
// full shift S = diag(e^{−i2πf/Nx}) ⊗ bath_shift must commute with h1.
struct RingModel {
    SystemModel model;
    Index nx = 0;
    double spacing = 1.0;
    Matrix bath_shift;
};

double plane_wave_phase(Index f, Index x, Index nx);  // 2πfx/Nx
cplx plane_wave(Index f, Index x, Index nx);          // u_f(x)

// Full-shift commutator defect; throws SymmetryError above 1e-10.
double check_translation_invariance(const RingModel& ring, const SectorOperators& sec);

struct TranslationKernel {
    Index nx = 0;
    double spacing = 1.0;
    Index k = 0;
    Index l = 0;
    SpectralPoint point;
    std::vector<Matrix> site_blocks;  // T^k_l(X, z), X = 0..nx−1
    Matrix total;                     // T^k_l(z)

    // max |Σ_X T^k_l(X) − T^k_l|
    double resummation_residual() const;
};

// T^k_l(X) = u_k*(X) Σ_k' u_k'(X) T^k'_l, built from a full block table at one z.
Matrix site_block(const std::vector<std::vector<Matrix>>& table, Index nx, Index x, Index k, Index l);

TranslationKernel position_resolved_blocks(const RingModel& ring, const SectorOperators& sec, const SpectralPoint& p,
                                           Index k, Index l);

} // namespace semigroup
