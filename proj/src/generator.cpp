// generator.cpp — Q, jump channels and the assembled bundle

#include "semigroup/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "semigroup/errors.hpp"

namespace semigroup {

Mode parse_mode(std::string_view text)
{
    if (text == "raw") return Mode::raw;
    if (text == "trace_enforced") return Mode::trace_enforced;
    throw DomainError("mode must be 'raw' or 'trace_enforced', got '" + std::string(text) + "'");
}

std::string to_string(Mode mode)
{
    return mode == Mode::raw ? "raw" : "trace_enforced";
}

void GeneratorBundle::validate() const
{
    const Index d = h.rows();
    if (d == 0 || h.cols() != d) throw ShapeError("GeneratorBundle: h must be square and nonempty");
    if (loss.rows() != d || loss.cols() != d) throw ShapeError("GeneratorBundle: loss shape differs from h");
    if (q.size() != 0 && (q.rows() != d || q.cols() != d)) throw ShapeError("GeneratorBundle: q shape differs from h");
    if (!h.allFinite() || !loss.allFinite()) throw DomainError("GeneratorBundle: non-finite entries");
    if (hermitian_defect(h) > 1e-10) throw DomainError("GeneratorBundle: h is not Hermitian");
    if (hermitian_defect(loss) > 1e-10) throw DomainError("GeneratorBundle: loss is not Hermitian");
    for (const auto& c : channels) {
        if (c.op.rows() != d || c.op.cols() != d) throw ShapeError("GeneratorBundle: channel shape differs from h");
        if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) {
            throw DomainError("GeneratorBundle: channel weights must be finite and nonnegative");
        }
        if (!c.op.allFinite()) throw DomainError("GeneratorBundle: channel has non-finite entries");
    }
}

namespace {

void check_eta(double eta)
{
    if (!(eta > kResonanceGuard) || !std::isfinite(eta)) {
        std::ostringstream os;
        os << "eta must be finite and exceed " << kResonanceGuard << ", got " << eta;
        throw DomainError(os.str());
    }
}

void check_bath(const SystemModel& model, const BathState& bath)
{
    if (bath.dim() != model.d_b()) throw ShapeError("bath state dimension differs from d_b");
}

} // namespace

std::vector<std::vector<Matrix>> scattering_blocks(const SystemModel& model, const SectorOperators& sec, double eta)
{
    check_eta(eta);
    const Index ds = model.d_s();
    std::vector<std::vector<Matrix>> blocks(static_cast<std::size_t>(ds));
    for (Index k = 0; k < ds; ++k) {
        const auto p = SpectralPoint::for_energy(model.micro_energies()[static_cast<std::size_t>(k)], eta);
        const Matrix map = t_apply(sec, p, k);
        for (Index f = 0; f < ds; ++f) blocks[static_cast<std::size_t>(k)].push_back(block_of(map, f, sec.d_b));
    }
    return blocks;
}

Matrix build_q(const std::vector<std::vector<Matrix>>& blocks, const BathState& bath)
{
    const auto ds = static_cast<Index>(blocks.size());
    Matrix q(ds, ds);
    for (Index k = 0; k < ds; ++k) {
        for (Index f = 0; f < ds; ++f) {
            q(k, f) = (blocks[static_cast<std::size_t>(k)][static_cast<std::size_t>(f)] * bath.rho_m()).trace();
        }
    }
    return q;
}

Matrix build_q(const SystemModel& model, const SectorOperators& sec, const BathState& bath, double eta)
{
    check_bath(model, bath);
    return build_q(scattering_blocks(model, sec, eta), bath);
}

Matrix build_q_adjoint(const SystemModel& model, const SectorOperators& sec, const BathState& bath, double eta)
{
    check_eta(eta);
    check_bath(model, bath);
    const Index ds = model.d_s();
    const Index db = model.d_b();
    Matrix out(ds, ds);
    for (Index h = 0; h < ds; ++h) {
        // z = iE_h + η is the conjugate of the point used for Q.
        const auto p = SpectralPoint::from_z(cplx(eta, model.micro_energies()[static_cast<std::size_t>(h)]));
        const Matrix y = t_apply_adjoint(sec, p, h);
        for (Index g = 0; g < ds; ++g) out(g, h) = (y.middleRows(g * db, db) * bath.rho_m()).trace();
    }
    return out;
}

ChannelSet build_jump_channels(const std::vector<std::vector<Matrix>>& blocks, const SystemModel& model,
                               const BathState& bath, double eta, double weight_floor, Execution exec)
{
    check_eta(eta);
    check_bath(model, bath);
    const Index ds = model.d_s();
    const Index db = model.d_b();
    const auto& spec = model.bath_spectrum();
    const auto& energies = model.micro_energies();

    ChannelSet out;
    std::vector<Index> kept_xi;
    for (Index xi = 0; xi < db; ++xi) {
        if (bath.weights()(xi) > weight_floor) {
            kept_xi.push_back(xi);
        } else {
            ++out.pruned_count;
            out.pruned_mass += bath.weights()(xi);
        }
    }
    if (kept_xi.empty()) return out;

    // Blocks and ξ vectors expressed in the H_m eigenbasis.
    std::vector<Matrix> w(static_cast<std::size_t>(ds * ds));
    for (Index k = 0; k < ds; ++k) {
        for (Index f = 0; f < ds; ++f) {
            w[static_cast<std::size_t>(k * ds + f)] =
                spec.vectors.adjoint() * blocks[static_cast<std::size_t>(k)][static_cast<std::size_t>(f)] * spec.vectors;
        }
    }
    const Matrix xi_coords = spec.vectors.adjoint() * bath.eigenvectors();
    const double scale = std::sqrt(2.0 * eta);

    const auto n_xi = static_cast<Index>(kept_xi.size());
    const Index n_pairs = db * n_xi;
    std::vector<Matrix> ops(static_cast<std::size_t>(n_pairs));

#pragma omp parallel for schedule(static) num_threads(thread_cap()) if (exec == Execution::parallel)
    for (Index pair = 0; pair < n_pairs; ++pair) {
        const Index lam = pair / n_xi;
        const Index xi = kept_xi[static_cast<std::size_t>(pair % n_xi)];
        Matrix l(ds, ds);
        for (Index k = 0; k < ds; ++k) {
            for (Index f = 0; f < ds; ++f) {
                const Matrix& wkf = w[static_cast<std::size_t>(k * ds + f)];
                const double shift = energies[static_cast<std::size_t>(k)] + spec.values(lam)
                                     - energies[static_cast<std::size_t>(f)];
                cplx acc = 0.0;
                for (Index j = 0; j < db; ++j) {
                    acc += wkf(lam, j) * xi_coords(j, xi) / cplx(shift - spec.values(j), -eta);
                }
                l(k, f) = scale * acc;
            }
        }
        ops[static_cast<std::size_t>(pair)] = std::move(l);
    }

    for (Index pair = 0; pair < n_pairs; ++pair) {
        Matrix& l = ops[static_cast<std::size_t>(pair)];
        if (max_abs(l) == 0.0) {
            ++out.zero_count;
            continue;
        }
        const Index xi = kept_xi[static_cast<std::size_t>(pair % n_xi)];
        out.channels.push_back(Channel{bath.weights()(xi), std::move(l), pair / n_xi, xi});
    }
    return out;
}

ChannelSet build_jump_channels(const SystemModel& model, const SectorOperators& sec, const BathState& bath, double eta,
                               double weight_floor, Execution exec)
{
    return build_jump_channels(scattering_blocks(model, sec, eta), model, bath, eta, weight_floor, exec);
}

Matrix channel_loss(const std::vector<Channel>& channels, Index dim)
{
    Matrix out = Matrix::Zero(dim, dim);
    for (const auto& c : channels) out += c.weight * (c.op.adjoint() * c.op);
    return out;
}

GeneratorBundle assemble_generator(const Matrix& q, std::vector<Channel> channels,
                                   const std::vector<double>& micro_energies, Mode mode)
{
    const auto d = static_cast<Index>(micro_energies.size());
    if (q.rows() != d || q.cols() != d) throw ShapeError("assemble_generator: q shape differs from micro dimension");
    GeneratorBundle b;
    b.q = q;
    b.mode = mode;
    b.h = Matrix::Zero(d, d);
    for (Index f = 0; f < d; ++f) b.h(f, f) = micro_energies[static_cast<std::size_t>(f)];
    b.h += 0.5 * kI * (q - q.adjoint());
    b.h = hermitian_part(b.h);
    if (mode == Mode::raw) {
        b.loss = -0.5 * (q + q.adjoint());
    } else {
        b.loss = 0.5 * channel_loss(channels, d);
    }
    b.loss = hermitian_part(b.loss);
    b.channels = std::move(channels);
    b.validate();
    return b;
}

Extraction extract_generator(const SystemModel& model, const BathState& bath, double eta, Mode mode,
                             double weight_floor, Execution exec)
{
    check_bath(model, bath);
    const auto sec = build_sectors(model);
    const auto blocks = scattering_blocks(model, sec, eta);
    const Matrix q = build_q(blocks, bath);
    Extraction out;
    out.channel_set = build_jump_channels(blocks, model, bath, eta, weight_floor, exec);
    out.bundle = assemble_generator(q, out.channel_set.channels, model.micro_energies(), mode);
    out.bundle.eta = eta;
    return out;
}

double trace_defect(const Matrix& q, const std::vector<Channel>& channels, const Matrix& rho1)
{
    if (q.rows() != rho1.rows() || q.cols() != rho1.cols()) throw ShapeError("trace_defect: shapes differ");
    const Matrix m = q + q.adjoint() + channel_loss(channels, q.rows());
    return std::abs((rho1 * m).trace());
}

double worst_trace_defect(const Matrix& q, const std::vector<Channel>& channels)
{
    const Matrix m = q + q.adjoint() + channel_loss(channels, q.rows());
    return eigh(m).values.cwiseAbs().maxCoeff();
}

std::vector<double> relevant_poles(const SystemModel& model)
{
    const auto& e = model.bath_spectrum().values;
    std::vector<double> poles;
    for (Index a = 0; a < e.size(); ++a) {
        for (Index b = 0; b < e.size(); ++b) {
            for (double ef : model.micro_energies()) poles.push_back(e(a) - e(b) - ef);
        }
    }
    std::sort(poles.begin(), poles.end());
    poles.erase(std::unique(poles.begin(), poles.end(), [](double x, double y) { return std::abs(x - y) <= 1e-9; }),
                poles.end());
    return poles;
}

TimescaleDiagnostics timescale_report(const SystemModel& model, const BathState& bath, const Matrix& rho1, double eta)
{
    check_bath(model, bath);
    const Index ds = model.d_s();
    if (rho1.rows() != ds || rho1.cols() != ds) throw ShapeError("timescale_report: rho1 must be d_s x d_s");
    const auto& spec = model.bath_spectrum();
    const auto& e = model.micro_energies();

    TimescaleDiagnostics d;
    d.eta_used = eta;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Index l = 0; l < spec.values.size(); ++l) {
        for (double ef : e) {
            lo = std::min(lo, spec.values(l) + ef);
            hi = std::max(hi, spec.values(l) + ef);
        }
    }
    d.sigma = hi - lo;
    const auto poles = relevant_poles(model);
    if (model.d_b() == 1 || poles.size() < 2) {
        d.delta = 0.0;
        d.warnings.push_back("bath level spacing is degenerate (single level or single pole); "
                             "eta must be chosen explicitly, no plateau scan is possible");
    } else {
        d.delta = (poles.back() - poles.front()) / static_cast<double>(poles.size() - 1);
    }
    if (d.sigma > 0.0) {
        d.tau = 10.0 / d.sigma;
    } else {
        d.tau = std::numeric_limits<double>::infinity();
        d.warnings.push_back("zero spectral spread; the coarse-graining window is unbounded");
    }

    double max_split = 0.0;
    for (Index g = 0; g < ds; ++g) {
        for (Index f = 0; f < ds; ++f) {
            if (g != f && std::abs(rho1(g, f)) > 0.01) max_split = std::max(max_split, std::abs(e[g] - e[f]));
        }
    }
    d.tau1_estimate = max_split > 0.0 ? 1.0 / max_split : std::numeric_limits<double>::infinity();

    const double tau = std::isfinite(d.tau) ? d.tau : 0.0;
    d.micro_coherence = ConditionFlag{true, max_split * tau, 0.1};
    d.micro_coherence.ok = d.micro_coherence.measured <= d.micro_coherence.threshold;

    const Matrix rho_h = spec.vectors.adjoint() * bath.rho_m() * spec.vectors;
    double window = 0.0;
    double off_eq = 0.0;
    const double min_gap = std::isfinite(d.tau1_estimate) ? 1.0 / d.tau1_estimate : 0.0;
    for (Index a = 0; a < rho_h.rows(); ++a) {
        for (Index b = 0; b < rho_h.cols(); ++b) {
            const double gap = spec.values(b) - spec.values(a);
            if (a != b && std::abs(gap) >= min_gap) off_eq = std::max(off_eq, std::abs(rho_h(a, b)));
            if (std::abs(rho_h(a, b)) <= 1e-12) continue;
            for (Index h = 0; h < ds; ++h) {
                for (Index g = 0; g < ds; ++g) {
                    if (std::abs(rho1(h, g)) > 0.01) window = std::max(window, std::abs(gap + e[h] - e[g]) * tau);
                }
            }
        }
    }
    d.coarse_grain_window = ConditionFlag{window <= 0.1, window, 0.1};
    d.bath_equilibrium = ConditionFlag{off_eq <= 1e-10 && bath.commutator_defect() < 1e-10, off_eq, 1e-10};
    if (eta > 0.0 && d.delta > 0.0 && eta < d.delta) {
        d.warnings.push_back("eta is below the mean pole spacing; finite-bath recurrences are resolved");
    }
    if (eta > 0.0 && d.sigma > 0.0 && eta > 0.5 * d.sigma) {
        d.warnings.push_back("eta exceeds half the spectral spread; the bath continuum is over-smoothed");
    }
    return d;
}

double default_eta(const TimescaleDiagnostics& diag)
{
    if (!(diag.delta > 0.0)) throw DomainError("default eta needs a nondegenerate pole spacing; pass eta explicitly");
    return 10.0 * diag.delta;
}

std::vector<double> eta_grid(double lo, double hi, std::size_t n)
{
    if (!(lo > 0.0) || !(hi > lo) || n < 3) throw DomainError("eta_grid: need 0 < lo < hi and at least 3 points");
    std::vector<double> out(n);
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
    out.back() = hi;
    return out;
}

std::vector<EtaScanRow> eta_scan(const SystemModel& model, const BathState& bath, const std::vector<double>& etas)
{
    const auto sec = build_sectors(model);
    std::vector<EtaScanRow> rows;
    rows.reserve(etas.size());
    for (double eta : etas) {
        const auto blocks = scattering_blocks(model, sec, eta);
        const Matrix q = build_q(blocks, bath);
        const auto cs = build_jump_channels(blocks, model, bath, eta);
        double cn = 0.0;
        for (const auto& c : cs.channels) cn += c.weight * c.op.squaredNorm();
        rows.push_back(EtaScanRow{eta, q.norm(), cn});
    }
    return rows;
}

Plateau plateau_eta(const std::vector<EtaScanRow>& rows)
{
    if (rows.size() < 3) throw DomainError("plateau_eta: need at least 3 scan rows");
    Plateau best;
    best.slope = std::numeric_limits<double>::infinity();
    auto slope = [](double y0, double y1, double x0, double x1) {
        if (y0 <= 0.0 || y1 <= 0.0) return 0.0;
        return (std::log(y1) - std::log(y0)) / (std::log(x1) - std::log(x0));
    };
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        const auto& a = rows[i - 1];
        const auto& b = rows[i + 1];
        const double s = std::max(std::abs(slope(a.q_norm, b.q_norm, a.eta, b.eta)),
                                  std::abs(slope(a.channel_norm, b.channel_norm, a.eta, b.eta)));
        if (s < best.slope) best = Plateau{rows[i].eta, s, i};
    }
    return best;
}

Plateau find_plateau(const SystemModel& model, const BathState& bath, std::size_t n)
{
    const Index ds = model.d_s();
    const auto diag = timescale_report(model, bath, Matrix::Identity(ds, ds) / static_cast<double>(ds), 0.0);
    if (!(diag.delta > 0.0) || !(0.5 * diag.sigma > diag.delta)) {
        throw DomainError("eta plateau scan needs delta < sigma/2");
    }
    return plateau_eta(eta_scan(model, bath, eta_grid(diag.delta, 0.5 * diag.sigma, n)));
}

double SiteChannel::resummation_residual() const
{
    Matrix sum = Matrix::Zero(op.rows(), op.cols());
    for (const auto& m : site_ops) sum += m;
    return max_abs(sum - op);
}

std::vector<SiteChannel> position_resolved_channels(const RingModel& ring, const SectorOperators& sec,
                                                    const BathState& bath, double eta, double weight_floor)
{
    check_eta(eta);
    check_translation_invariance(ring, sec);
    const SystemModel& model = ring.model;
    const Index ds = model.d_s();
    const Index nx = ring.nx;

    // site_blocks[x][k][f] = T^k_f(X = x, z_k)
    std::vector<std::vector<std::vector<Matrix>>> site(static_cast<std::size_t>(nx),
                                                       std::vector<std::vector<Matrix>>(static_cast<std::size_t>(ds)));
    for (Index k = 0; k < ds; ++k) {
        const auto p = SpectralPoint::for_energy(model.micro_energies()[static_cast<std::size_t>(k)], eta);
        const auto table = t_block_table(sec, p);
        for (Index x = 0; x < nx; ++x) {
            auto& row = site[static_cast<std::size_t>(x)][static_cast<std::size_t>(k)];
            for (Index f = 0; f < ds; ++f) row.push_back(site_block(table, nx, x, k, f));
        }
    }

    const auto total = build_jump_channels(scattering_blocks(model, sec, eta), model, bath, eta, weight_floor,
                                           Execution::serial);
    std::vector<std::vector<Channel>> per_site;
    per_site.reserve(static_cast<std::size_t>(nx));
    for (Index x = 0; x < nx; ++x) {
        // Same formula as the full channels, fed with the site-resolved blocks.
        const auto cs = build_jump_channels(site[static_cast<std::size_t>(x)], model, bath, eta, weight_floor,
                                            Execution::serial);
        per_site.push_back(cs.channels);
    }

    std::vector<SiteChannel> out;
    for (const auto& c : total.channels) {
        SiteChannel sc{c.weight, c.lambda, c.xi, c.op, {}};
        for (Index x = 0; x < nx; ++x) {
            Matrix m = Matrix::Zero(ds, ds);
            for (const auto& s : per_site[static_cast<std::size_t>(x)]) {
                if (s.lambda == c.lambda && s.xi == c.xi) m = s.op;
            }
            sc.site_ops.push_back(std::move(m));
        }
        out.push_back(std::move(sc));
    }
    return out;
}

} // namespace semigroup
