// unravel.hpp — Jump-process decomposition: no-jump contraction, count-resolved
// Dyson terms, Monte Carlo trajectories, counting probabilities and effects.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "semigroup/generator.hpp"
#include "semigroup/parallel.hpp"

namespace semigroup {

// ρ ↦ UρU† with U = exp(−i(𝖧 − iA)(t₂ − t₁)).
struct Contraction {
    Matrix u;
    Matrix apply(const Matrix& rho) const { return u * rho * u.adjoint(); }
};

Contraction no_jump_propagator(const GeneratorBundle& bundle, double t1, double t2);

inline constexpr int kMaxDysonOrder = 12;

struct DysonExpansion {
    std::vector<Matrix> terms;  // terms[k]: exactly k events in [0, t]
    double tail_mass = 0.0;     // Tr exp(𝓛t)ρ₀ − Σ_k Tr terms[k]
};

// Count-resolved block propagation: block generator over counts 0..n_max with
// the no-jump generator on the diagonal and Σ π L·L† one block below it,
// exponentiated once. Throws CostError for n_max > 12.
DysonExpansion dyson_terms(const GeneratorBundle& bundle, const Matrix& rho0, double t, int n_max);

struct OutcomeProbabilities {
    std::vector<double> per_count;  // ⟨u_α| terms[k] |u_α⟩
    double p0 = 0.0;                // Tr terms[0]
};

OutcomeProbabilities outcome_probability(const GeneratorBundle& bundle, const Matrix& rho0, double t,
                                         const Vector& alpha_ket, int n_max);

// ------------------------------------------------------------ trajectories --

struct Event {
    double time = 0.0;
    std::size_t channel = 0;  // index into bundle.channels
    Index lambda = 0;
    Index xi = 0;
};

struct Trajectory {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    std::vector<Event> events;
    Vector final_ket;     // normalized state at t, or at absorption
    bool survived = true; // false when the particle was absorbed
};

struct TrajectoryEnsemble {
    std::vector<Trajectory> trajectories;
    Matrix averaged_state;  // Σ over survivors of |ψ⟩⟨ψ|, divided by n_traj (pairwise summation)
};

// Waiting-time jump algorithm; trajectory i draws from RandomStream(seed, i).
TrajectoryEnsemble sample_trajectories(const GeneratorBundle& bundle, const Vector& psi0, double t,
                                       std::size_t n_traj, std::uint64_t seed,
                                       Execution exec = Execution::parallel);

struct CountEstimate {
    double probability = 0.0;
    double standard_error = 0.0;
};

// Fraction of trajectories with exactly k events, k = 0..n_max, with binomial errors.
std::vector<CountEstimate> count_histogram(const TrajectoryEnsemble& ensemble, int n_max);

// ---------------------------------------------------------------- counting --

struct CountingQuery {
    double t1 = 0.0;
    double t2 = 0.0;
    int n_events = 0;
    std::vector<std::size_t> sigma;  // counted channel indices
    int n_max = kMaxDysonOrder;
};

inline constexpr double kProbabilityFloor = 1e-12;

struct EffectReport {
    double probability = 0.0;
    Matrix effect;                          // F(σ), 0 ≤ F ≤ I
    Matrix operation_output;                // 𝓕ρ (unnormalized)
    std::optional<Matrix> conditional_state;
    bool below_floor = false;
};

// The operation 𝓕(N, σ) over [t1, t2]: channels outside σ are folded into the
// non-counting block, only σ increments the counter.
Superoperator counting_operation(const GeneratorBundle& bundle, const CountingQuery& query);

EffectReport counting_probability(const GeneratorBundle& bundle, const Matrix& rho_at_t1, const CountingQuery& query);

// π LρL† / Tr(π LρL†) for a single channel; throws DomainError if the trace vanishes.
Matrix jump_update(const GeneratorBundle& bundle, const Matrix& rho, std::size_t channel);

} // namespace semigroup
