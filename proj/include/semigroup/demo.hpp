// demo.hpp — Reference models and random scenario builders shared by the CLI,
// the validation suite, the tests and the benchmarks.

#pragma once

#include <cstddef>
#include <vector>

#include "semigroup/generator.hpp"
#include "semigroup/rng.hpp"
#include "semigroup/tmatrix.hpp"

namespace semigroup {

inline constexpr double kDemoBeta = 1.0;
inline constexpr double kDemoSplitting = 0.02;

// d_s = 2, d_b = 6 bath with levels spanning [−2, 2]. Coupling blocks have unit
// spectral norm before scaling by g: B₀₀ is nearest-neighbour hopping in the
// level basis, B₀₁ = B₁₀† = ½·X/‖X‖ with X_ij = e^{0.7i(i−j)}/(1+|i−j|), B₁₁ = 0.
SystemModel demo_model(double g, std::vector<double> micro_energies = {0.0, kDemoSplitting});

// d_s = 2, d_b = 4 variant (levels −1.5, −0.4, 0.6, 1.5) used by `extract`.
SystemModel extract_demo_model(double g = 0.05);

// Particle on a ring of nx sites contact-coupled to one excitation hopping on an
// identical ring: V = g Σ_x n_x ⊗ |x⟩⟨x|, bath_shift |x⟩ → |x+1⟩.
RingModel demo_ring(Index nx = 4, double g = 0.1);

// (|0⟩ + |1⟩)/√2 as a density matrix.
Matrix demo_initial_state();

// Standard complex Gaussian entries (Box–Muller on the stream).
Matrix random_matrix(RandomStream& rng, Index rows, Index cols);
Matrix random_hermitian(RandomStream& rng, Index d);
// Full-rank random density matrix (Wishart, normalized).
Matrix random_density(RandomStream& rng, Index d);
Vector random_ket(RandomStream& rng, Index d);

// Random Lindblad bundle. trace_enforced: loss = ½ΣπL†L. raw: loss adds a
// random PSD absorber on top, so the trace is non-increasing.
GeneratorBundle random_bundle(RandomStream& rng, Index d, std::size_t n_channels, Mode mode);

// Random model with Hermitian coupling of spectral norm g per block pair.
SystemModel random_model(RandomStream& rng, Index d_s, Index d_b, double g);

} // namespace semigroup
