// generator.hpp — Reduced-dynamics generator: coherent shift Q, jump channels,
// assembled Lindblad bundle, trace-conservation residual, timescale diagnostics.
//
// With z_k = −iE_k + η:
//   Q_kf       = Tr[T^k_f(z_k) ρᵐ]
//   (L_λξ)_kf  = √(2η) ⟨λ| T^k_f(z_k) (E_k + E_λ − E_f − H_m − iη)⁻¹ |ξ⟩
//   𝖧          = diag(E) + (i/2)(Q − Q†)
//   A          = −½(Q + Q†)            (raw)
//              = ½ Σ π_ξ L†L           (trace_enforced)
//   ρ̇          = −i[𝖧,ρ] − {A,ρ} + Σ π_ξ L ρ L†

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "semigroup/fock.hpp"
#include "semigroup/parallel.hpp"
#include "semigroup/tmatrix.hpp"

namespace semigroup {

enum class Mode { raw, trace_enforced };

Mode parse_mode(std::string_view text);
std::string to_string(Mode mode);

struct Channel {
    double weight = 1.0;  // π_ξ
    Matrix op;            // L_λξ
    Index lambda = 0;
    Index xi = 0;
};

struct ChannelSet {
    std::vector<Channel> channels;
    std::size_t pruned_count = 0;   // ξ below the weight floor
    double pruned_mass = 0.0;       // Σ π_ξ over pruned ξ (once per ξ)
    std::size_t zero_count = 0;     // identically zero operators dropped
};

// A time-independent generator in Lindblad form. q is empty for bundles that
// were not extracted from a model (optics, hand-built test generators).
struct GeneratorBundle {
    Matrix h;
    Matrix loss;
    Matrix q;
    std::vector<Channel> channels;
    Mode mode = Mode::trace_enforced;
    double eta = 0.0;

    Index dim() const noexcept { return h.rows(); }
    // Shapes, Hermiticity of h and loss (1e-10), nonnegative finite weights.
    void validate() const;
};

inline constexpr double kDefaultWeightFloor = 1e-12;

// blocks[k][f] = T^k_f(−iE_k + η); shared by build_q and build_jump_channels.
std::vector<std::vector<Matrix>> scattering_blocks(const SystemModel& model, const SectorOperators& sec, double eta);

Matrix build_q(const std::vector<std::vector<Matrix>>& blocks, const BathState& bath);
Matrix build_q(const SystemModel& model, const SectorOperators& sec, const BathState& bath, double eta);

// Q† from (Q†)_gh = Tr[a_g(𝒯(iE_h+η)a†_h) ρᵐ], evaluated with the N=0 → N=1 resolvent.
Matrix build_q_adjoint(const SystemModel& model, const SectorOperators& sec, const BathState& bath, double eta);

ChannelSet build_jump_channels(const std::vector<std::vector<Matrix>>& blocks, const SystemModel& model,
                               const BathState& bath, double eta, double weight_floor = kDefaultWeightFloor,
                               Execution exec = Execution::parallel);
ChannelSet build_jump_channels(const SystemModel& model, const SectorOperators& sec, const BathState& bath, double eta,
                               double weight_floor = kDefaultWeightFloor, Execution exec = Execution::parallel);

GeneratorBundle assemble_generator(const Matrix& q, std::vector<Channel> channels,
                                   const std::vector<double>& micro_energies, Mode mode);

// Q, channels and bundle in one pass over the T-blocks.
struct Extraction {
    GeneratorBundle bundle;
    ChannelSet channel_set;
};

Extraction extract_generator(const SystemModel& model, const BathState& bath, double eta, Mode mode,
                             double weight_floor = kDefaultWeightFloor, Execution exec = Execution::parallel);

// Σ π L†L
Matrix channel_loss(const std::vector<Channel>& channels, Index dim);

// |Tr[ρ(Q+Q†)] + Tr[ρ Σπ L†L]|
double trace_defect(const Matrix& q, const std::vector<Channel>& channels, const Matrix& rho1);

// max over states of the same quantity: largest |eig(Q + Q† + Σπ L†L)|.
double worst_trace_defect(const Matrix& q, const std::vector<Channel>& channels);

// ------------------------------------------------------------ timescales --

struct ConditionFlag {
    bool ok = true;
    double measured = 0.0;
    double threshold = 0.0;
};

// Flags use a margin factor 10 and the coarse-graining step τ = 10/σ:
//   micro_coherence      max |E_g − E_f|·τ over |ρ¹_gf| > 0.01, g ≠ f          ≤ 0.1
//   coarse_grain_window  max |E_λ' + E_h − E_λ − E_g|·τ over relevant pairs      ≤ 0.1
//                        (|ρᵐ_λλ'| > 1e-12 in the H_m basis, |ρ¹_hg| > 0.01)
//   bath_equilibrium     max |ρᵐ_λλ'| (H_m basis) over |E_λ − E_λ'| ≥ 1/τ₁       ≤ 1e-10
struct TimescaleDiagnostics {
    double sigma = 0.0;          // spread of {E_λ + E_f}
    double delta = 0.0;          // mean gap of distinct {E_λ' − E_λ − E_f}; 0 when degenerate
    double tau = 0.0;            // 10/σ
    double tau1_estimate = 0.0;  // +inf when ρ¹ has no relevant coherence
    double eta_used = 0.0;
    ConditionFlag micro_coherence;
    ConditionFlag coarse_grain_window;
    ConditionFlag bath_equilibrium;
    std::vector<std::string> warnings;
};

TimescaleDiagnostics timescale_report(const SystemModel& model, const BathState& bath, const Matrix& rho1, double eta);

// Relevant pole positions {E_λ' − E_λ − E_f}, deduplicated at 1e-9.
std::vector<double> relevant_poles(const SystemModel& model);

// 10·δ, or throws DomainError when δ is degenerate.
double default_eta(const TimescaleDiagnostics& diag);

struct EtaScanRow {
    double eta = 0.0;
    double q_norm = 0.0;        // ‖Q‖_F
    double channel_norm = 0.0;  // Σ π ‖L‖²_F
};

std::vector<double> eta_grid(double lo, double hi, std::size_t n = 25);
std::vector<EtaScanRow> eta_scan(const SystemModel& model, const BathState& bath, const std::vector<double>& etas);

// Interior grid point minimizing max(|dlog‖Q‖/dlogη|, |dlog Σπ‖L‖²/dlogη|), central differences.
struct Plateau {
    double eta = 0.0;
    double slope = 0.0;
    std::size_t index = 0;
};

Plateau plateau_eta(const std::vector<EtaScanRow>& rows);

// Geometric grid on [δ, σ/2] followed by plateau_eta.
Plateau find_plateau(const SystemModel& model, const BathState& bath, std::size_t n = 25);

// ------------------------------------------------------ ring lattice --

struct SiteChannel {
    double weight = 1.0;
    Index lambda = 0;
    Index xi = 0;
    Matrix op;                     // L_λξ
    std::vector<Matrix> site_ops;  // L_λξ(X)

    double resummation_residual() const;
};

std::vector<SiteChannel> position_resolved_channels(const RingModel& ring, const SectorOperators& sec,
                                                    const BathState& bath, double eta,
                                                    double weight_floor = kDefaultWeightFloor);

} // namespace semigroup
