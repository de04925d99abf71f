// algebra.hpp — Dense complex linear algebra: Kronecker products, partial traces,
// matrix exponentials, shifted Sylvester solves, Choi matrices, distances.
//
// Conventions shared by every module:
//   * hbar = 1; all energies dimensionless.
//   * tensor(A, B) uses the row-major block layout: (A⊗B)(i*rB + k, j*cB + l) = A(i,j) B(k,l).
//     Composite systems are ordered micro-first: index (f, b) -> f*d_b + b.
//   * Superoperators act on column-stacked operators: vec(X)(i + j*d) = X(i,j), so that
//     vec(A X B) = (Bᵀ ⊗ A) vec(X).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

namespace semigroup {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr cplx kI{0.0, 1.0};

// Largest dimension of any dense matrix built by tensor() or by a superoperator.
inline constexpr Index kMaxDenseDim = 4096;

// ------------------------------------------------------------------ basics --

double max_abs(const Matrix& m);

// max |m - m†|
double hermitian_defect(const Matrix& m);

bool is_hermitian(const Matrix& m, double tol = 1e-10);

Matrix hermitian_part(const Matrix& m);

struct HermitianSpectrum {
    RealVector values;   // ascending
    Matrix vectors;      // columns are eigenvectors
};

// Eigen-decomposition of the Hermitian part of m.
HermitianSpectrum eigh(const Matrix& m);

double min_eigenvalue(const Matrix& hermitian);
double max_eigenvalue(const Matrix& hermitian);

// ½ Σ |eig(a - b)| for Hermitian a, b.
double trace_distance(const Matrix& a, const Matrix& b);

double purity(const Matrix& rho);

Matrix projector(const Vector& ket);

// ------------------------------------------------------- tensor structure --

Matrix tensor(const Matrix& a, const Matrix& b, Index max_dim = kMaxDenseDim);

// Tr_bath of a (d_s·d_b)² operator in micro-first order.
Matrix partial_trace_bath(const Matrix& rho_full, Index d_s, Index d_b);

// --------------------------------------------------------------- exponent --

inline constexpr double kDefaultExpmNormBound = 1e3;

// exp(m) by Padé scaling-and-squaring. Throws ConditioningError when the
// 1-norm of m exceeds norm_bound.
Matrix expm(const Matrix& m, double norm_bound = kDefaultExpmNormBound);

// ------------------------------------------------ shifted Sylvester solve --

// Guard distance below which z is treated as resonant.
inline constexpr double kResonanceGuard = 1e-12;

// Solves z·Y − i(h_left·Y − Y·h_right) = X for Hermitian h_left, h_right by
// diagonalizing both once; each solve() is then two basis changes and a
// pointwise division.
class ShiftedSylvesterSolver {
public:
    ShiftedSylvesterSolver(const Matrix& h_left, const Matrix& h_right);
    static ShiftedSylvesterSolver from_spectra(HermitianSpectrum left, HermitianSpectrum right);

    // Solver for the reversed problem zY − i(h_right·Y − Y·h_left) = X, no new diagonalization.
    ShiftedSylvesterSolver reversed() const { return from_spectra(right_, left_); }

    Matrix solve(cplx z, const Matrix& x) const;

    const HermitianSpectrum& left() const noexcept { return left_; }
    const HermitianSpectrum& right() const noexcept { return right_; }

private:
    ShiftedSylvesterSolver() = default;

    HermitianSpectrum left_;
    HermitianSpectrum right_;
};

Matrix solve_shifted_sylvester(cplx z, const Matrix& h_left, const Matrix& h_right, const Matrix& x);

// -------------------------------------------------------- superoperators --

Vector vec(const Matrix& op);
Matrix unvec(const Vector& v, Index rows, Index cols);
Matrix unvec(const Vector& v, Index dim);

// A d²×d² matrix acting on column-stacked d×d operators.
struct Superoperator {
    Matrix matrix;
    Index dim = 0;

    Superoperator() = default;
    Superoperator(Matrix m, Index d);

    Matrix apply(const Matrix& op) const;
    static Superoperator identity(Index d);
};

// X ↦ A X
Matrix left_multiplication(const Matrix& a);
// X ↦ X B
Matrix right_multiplication(const Matrix& b);
// X ↦ A X B
Matrix sandwich(const Matrix& a, const Matrix& b);
// X ↦ Xᵀ (used for negative controls)
Superoperator transpose_map(Index d);

// Σ_ij |i⟩⟨j| ⊗ S(|i⟩⟨j|). The map is completely positive iff this is PSD.
Matrix choi_matrix(const Superoperator& s);

} // namespace semigroup
