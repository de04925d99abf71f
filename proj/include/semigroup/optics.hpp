// optics.hpp — Refractive index from an effective potential and a two-path
// interferometer with which-way monitoring.
//
// Energy of the incoming particle is hν = 2πν (ħ = 1). The interferometer is a
// d_s = 2 system: |1⟩ and |2⟩ are the two paths, recombined on u₊ = (|1⟩+|2⟩)/√2.

#pragma once

#include <vector>

#include "semigroup/generator.hpp"

namespace semigroup {

struct OpticsModel {
    std::vector<cplx> potential;  // V per site (a single entry for a homogeneous medium)
    double nu = 1.0;              // frequency, hν = 2πν
    double mass = 1.0;            // carried for completeness; the index does not depend on it
};

struct IndexResult {
    std::vector<cplx> n;
    std::vector<bool> complex_flag;  // index not real (1 − V/hν off the nonnegative real axis)
    bool any_complex = false;
};

// n = sqrt(1 − V/hν), principal branch. Throws DomainError for ν ≤ 0.
IndexResult refractive_index(const OpticsModel& model);

struct InterferometerScenario {
    double phi = 0.0;      // phase plate on path 2
    cplx v2{0.0, 0.0};     // path-2 potential; Im V₂ ≥ 0 is absorption
    double gamma_w = 0.0;  // which-way rate on path 2, channel √γ_w |2⟩⟨2|
    double gamma_w1 = 0.0; // which-way rate on path 1, channel √γ_w1 |1⟩⟨1| (0 by default)
    double t_tr = 1.0;     // transit time
};

// 𝖧 = diag(0, Re V₂ + φ/t_tr), A = diag(γ_w1/2, Im V₂ + γ_w/2), raw mode.
// Throws DomainError for Im V₂ < 0, negative rates or t_tr ≤ 0.
GeneratorBundle build_interferometer(const InterferometerScenario& s);

struct InterferencePoint {
    double phi = 0.0;
    double total = 0.0;       // ⟨u₊|ρ(t_tr)|u₊⟩
    double coherent = 0.0;    // zero-event part
    double background = 0.0;  // Σ_{k≥1} event parts
};

struct InterferencePattern {
    std::vector<InterferencePoint> points;
    double visibility_total = 0.0;
    double visibility_coherent = 0.0;
    double visibility_background = 0.0;
    double p0 = 0.0;  // zero-event weight (φ-independent)
};

// (max − min)/(max + min) of sampled intensities.
double visibility(const std::vector<double>& intensities);

// Visibility of the fringe ⟨u₊|ρ(φ)|u₊⟩ over all φ: 2|ρ₁₂|/Tr ρ.
double fringe_visibility(const Matrix& rho);

// (|1⟩ + |2⟩)/√2
Vector balanced_input();

// Scans φ over phi_grid with every other parameter taken from `base`. The
// visibilities are the exact fringe visibilities, not grid extrema.
InterferencePattern interference_pattern(const InterferometerScenario& base, const Vector& psi0,
                                         const std::vector<double>& phi_grid, int n_max = 12);

// Closed form of ρ₁₂(t) for the interferometer generator.
cplx interferometer_coherence(const InterferometerScenario& s, const Matrix& rho0, double t);

} // namespace semigroup
