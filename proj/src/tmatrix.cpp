// tmatrix.cpp — T-superoperator on sector-crossing maps

#include "semigroup/tmatrix.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <sstream>

#include "semigroup/errors.hpp"

namespace semigroup {

SpectralPoint SpectralPoint::from_z(cplx z)
{
    if (!(z.real() > kResonanceGuard) || !std::isfinite(z.imag())) {
        std::ostringstream os;
        os << "SpectralPoint: eta = Re z must exceed " << kResonanceGuard << ", got " << z.real();
        throw DomainError(os.str());
    }
    return SpectralPoint{z, z.real()};
}

SpectralPoint SpectralPoint::for_energy(double energy, double eta)
{
    return from_z(cplx(eta, -energy));
}

namespace {

void check_mode(const SectorOperators& sec, Index k, const char* who)
{
    if (k < 0 || k >= sec.d_s) {
        std::ostringstream os;
        os << who << ": mode index " << k << " outside [0," << sec.d_s << ")";
        throw DomainError(os.str());
    }
}

} // namespace

Matrix t_apply(const SectorOperators& sec, const SpectralPoint& p, Index k)
{
    check_mode(sec, k, "t_apply");
    // 𝓥a_k = −i a_k v1, then 𝓥 applied to the resolvent output.
    const Matrix x = -kI * (sec.a_maps[static_cast<std::size_t>(k)] * sec.v1);
    const Matrix r = sec.crossing_solver->solve(p.z, x);
    return x - kI * (r * sec.v1);
}

Matrix t_apply_adjoint(const SectorOperators& sec, const SpectralPoint& p, Index k)
{
    check_mode(sec, k, "t_apply_adjoint");
    const Matrix x = kI * (sec.v1 * sec.a_dagger(k));
    const Matrix r = sec.crossing_solver->reversed().solve(p.z, x);
    return x + kI * (sec.v1 * r);
}

Matrix block_of(const Matrix& t_map, Index h, Index d_b)
{
    return t_map.middleCols(h * d_b, d_b);
}

TBlock t_block(const SectorOperators& sec, const SpectralPoint& p, Index k, Index h)
{
    check_mode(sec, h, "t_block");
    return TBlock{k, h, p, block_of(t_apply(sec, p, k), h, sec.d_b)};
}

Matrix t_block_adjoint_form(const SectorOperators& sec, const SpectralPoint& p, Index k, Index h)
{
    check_mode(sec, h, "t_block_adjoint_form");
    return sec.a_maps[static_cast<std::size_t>(h)] * t_apply_adjoint(sec, p.conjugate(), k);
}

std::vector<std::vector<Matrix>> t_block_table(const SectorOperators& sec, const SpectralPoint& p)
{
    std::vector<std::vector<Matrix>> table(static_cast<std::size_t>(sec.d_s));
    for (Index k = 0; k < sec.d_s; ++k) {
        const Matrix map = t_apply(sec, p, k);
        auto& row = table[static_cast<std::size_t>(k)];
        row.reserve(static_cast<std::size_t>(sec.d_s));
        for (Index h = 0; h < sec.d_s; ++h) row.push_back(block_of(map, h, sec.d_b));
    }
    return table;
}

Matrix crossing_hamiltonian_superop(const SectorOperators& sec, bool free)
{
    const Index n1 = sec.d_s * sec.d_b;
    const Matrix& h1 = free ? sec.h1_free : sec.h1;
    const Matrix left = tensor(Matrix::Identity(n1, n1), sec.h0);
    const Matrix right = tensor(h1.transpose(), Matrix::Identity(sec.d_b, sec.d_b));
    return kI * (left - right);
}

Matrix crossing_coupling_superop(const SectorOperators& sec)
{
    return -kI * tensor(sec.v1.transpose(), Matrix::Identity(sec.d_b, sec.d_b));
}

ResolventResidual verify_resolvent_identity(const SectorOperators& sec, const SpectralPoint& p)
{
    const Index n = sec.d_b * sec.d_s * sec.d_b;
    if (n > kMaxDenseDim) {
        std::ostringstream os;
        os << "verify_resolvent_identity: crossing space dimension " << n << " exceeds " << kMaxDenseDim;
        throw SizeError(os.str());
    }
    // Resonance screening on both spectra before the dense inversions.
    const auto& left = sec.crossing_solver->left();
    const HermitianSpectrum free_right = eigh(sec.h1_free);
    for (const RealVector* right : {&sec.crossing_solver->right().values, &free_right.values}) {
        for (Index i = 0; i < left.values.size(); ++i) {
            for (Index j = 0; j < right->size(); ++j) {
                if (std::abs(p.z - kI * (left.values(i) - (*right)(j))) < kResonanceGuard) {
                    std::ostringstream os;
                    os << "verify_resolvent_identity: z = " << p.z << " is resonant with pair (" << i << "," << j << ")";
                    throw ResonanceError(os.str(), static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                }
            }
        }
    }
    const Matrix id = Matrix::Identity(n, n);
    const Matrix hs = crossing_hamiltonian_superop(sec, false);
    const Matrix h0s = crossing_hamiltonian_superop(sec, true);
    const Matrix vs = crossing_coupling_superop(sec);
    const Matrix g = (p.z * id - hs).partialPivLu().inverse();
    const Matrix g0 = (p.z * id - h0s).partialPivLu().inverse();
    return ResolventResidual{max_abs(g - g0 * (id + vs * g)), max_abs(g - (id + g * vs) * g0)};
}

double plane_wave_phase(Index f, Index x, Index nx)
{
    // Reduce fx mod nx first so large rings keep full phase accuracy.
    const Index m = (f * x) % nx;
    return 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(nx);
}

cplx plane_wave(Index f, Index x, Index nx)
{
    return std::polar(1.0 / std::sqrt(static_cast<double>(nx)), plane_wave_phase(f, x, nx));
}

double check_translation_invariance(const RingModel& ring, const SectorOperators& sec)
{
    if (ring.nx <= 0 || ring.model.d_s() != ring.nx) {
        throw ModelError("RingModel: the number of micro modes must equal nx");
    }
    if (ring.bath_shift.rows() != sec.d_b || ring.bath_shift.cols() != sec.d_b) {
        throw ShapeError("RingModel: bath_shift must be d_b x d_b");
    }
    if (max_abs(ring.bath_shift * ring.bath_shift.adjoint() - Matrix::Identity(sec.d_b, sec.d_b)) > 1e-10) {
        throw ModelError("RingModel: bath_shift is not unitary");
    }
    Matrix micro = Matrix::Zero(ring.nx, ring.nx);
    for (Index f = 0; f < ring.nx; ++f) micro(f, f) = std::polar(1.0, -plane_wave_phase(f, 1, ring.nx));
    const Matrix shift = tensor(micro, ring.bath_shift);
    const double defect = max_abs(shift * sec.h1 - sec.h1 * shift);
    if (defect > 1e-10) {
        std::ostringstream os;
        os << "RingModel: h1 does not commute with the lattice shift (defect " << defect << ")";
        throw SymmetryError(os.str(), defect);
    }
    return defect;
}

Matrix site_block(const std::vector<std::vector<Matrix>>& table, Index nx, Index x, Index k, Index l)
{
    Matrix out = Matrix::Zero(table[0][0].rows(), table[0][0].cols());
    for (Index kp = 0; kp < nx; ++kp) {
        out += plane_wave(kp, x, nx) * table[static_cast<std::size_t>(kp)][static_cast<std::size_t>(l)];
    }
    return std::conj(plane_wave(k, x, nx)) * out;
}

double TranslationKernel::resummation_residual() const
{
    Matrix sum = Matrix::Zero(total.rows(), total.cols());
    for (const auto& b : site_blocks) sum += b;
    return max_abs(sum - total);
}

TranslationKernel position_resolved_blocks(const RingModel& ring, const SectorOperators& sec, const SpectralPoint& p,
                                           Index k, Index l)
{
    check_translation_invariance(ring, sec);
    check_mode(sec, k, "position_resolved_blocks");
    check_mode(sec, l, "position_resolved_blocks");
    const auto table = t_block_table(sec, p);
    TranslationKernel out;
    out.nx = ring.nx;
    out.spacing = ring.spacing;
    out.k = k;
    out.l = l;
    out.point = p;
    out.total = table[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
    out.site_blocks.reserve(static_cast<std::size_t>(ring.nx));
    for (Index x = 0; x < ring.nx; ++x) out.site_blocks.push_back(site_block(table, ring.nx, x, k, l));
    return out;
}

} // namespace semigroup
