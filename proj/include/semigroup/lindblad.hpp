// lindblad.hpp — Propagation of Lindblad-form generators, CP/TP verification,
// effective non-Hermitian Hamiltonian, normalized jump mixture.

#pragma once

#include <vector>

#include "semigroup/generator.hpp"

namespace semigroup {

// Defaults for every numerical threshold used by the propagation checks.
struct Tolerances {
    double trace = 1e-10;         // trace drift for tp_ok
    double choi = -1e-8;          // minimum Choi eigenvalue for cp_ok
    double hermitian = 1e-10;     // Hermiticity of propagated states
    double semigroup = 1e-9;      // composition law
    double positivity = 1e-10;    // min eigenvalue of propagated PSD states
    double jump_floor = 1e-14;    // Tr(2Aρ) below which the jump mixture is undefined
    double rk4 = 1e-10;           // local error target of the adaptive integrator
};

// 𝓛 as a d²×d² matrix on column-stacked operators.
Superoperator superoperator(const GeneratorBundle& bundle);

// −i[𝖧,ρ] − {A,ρ} + Σ π LρL†
Matrix apply_generator(const GeneratorBundle& bundle, const Matrix& rho);

enum class Propagation { exponential, rk4 };

// exp(𝓛t)ρ₀. Throws DomainError for t < 0.
Matrix propagate(const GeneratorBundle& bundle, const Matrix& rho0, double t,
                 Propagation method = Propagation::exponential, const Tolerances& tol = {});

// exp(𝓛t) as a superoperator.
Superoperator propagator(const GeneratorBundle& bundle, double t);

// Adaptive RK4 with step doubling; accepts steps whose doubled-step estimate
// is below tol.rk4 (max-norm).
Matrix rk4_propagate(const GeneratorBundle& bundle, const Matrix& rho0, double t, const Tolerances& tol = {});

// Piecewise-constant schedule of bundles applied in order.
struct Segment {
    GeneratorBundle bundle;
    double duration = 0.0;
};

Matrix propagate_schedule(const std::vector<Segment>& schedule, const Matrix& rho0,
                          Propagation method = Propagation::exponential);

struct PropagatorReport {
    double t = 0.0;
    double trace_drift = 0.0;   // max |Tr Φ(E_ij) − δ_ij| over matrix units
    double choi_min_eig = 0.0;
    bool cp_ok = false;
    bool tp_ok = false;
};

std::vector<PropagatorReport> verify_cp_tp(const GeneratorBundle& bundle, const std::vector<double>& t_list,
                                           const Tolerances& tol = {});

// 𝖧 − iA
Matrix effective_hamiltonian(const GeneratorBundle& bundle);

struct JumpMixture {
    Matrix delta_rho;   // τ·Σ π LρL†
    double weight = 0;  // τ·Tr(2Aρ)
    Matrix mixture;     // Σ π L̃ρL̃† with L̃ = L/√Tr(2Aρ)
};

JumpMixture normalized_jump_mixture(const GeneratorBundle& bundle, const Matrix& rho, double tau,
                                    const Tolerances& tol = {});

} // namespace semigroup
