// algebra.cpp — Dense linear-algebra substrate

#include "semigroup/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

#include "semigroup/errors.hpp"

namespace semigroup {

double max_abs(const Matrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermitian_defect(const Matrix& m)
{
    if (m.rows() != m.cols()) throw ShapeError("hermitian_defect: matrix is not square");
    return max_abs(m - m.adjoint());
}

bool is_hermitian(const Matrix& m, double tol)
{
    return m.rows() == m.cols() && hermitian_defect(m) <= tol;
}

Matrix hermitian_part(const Matrix& m)
{
    return 0.5 * (m + m.adjoint());
}

HermitianSpectrum eigh(const Matrix& m)
{
    if (m.rows() != m.cols()) throw ShapeError("eigh: matrix is not square");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
    if (solver.info() != Eigen::Success) {
        throw ConditioningError("eigh: eigen-decomposition did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const Matrix& hermitian)
{
    return eigh(hermitian).values.minCoeff();
}

double max_eigenvalue(const Matrix& hermitian)
{
    return eigh(hermitian).values.maxCoeff();
}

double trace_distance(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError("trace_distance: operand shapes differ");
    }
    return 0.5 * eigh(a - b).values.cwiseAbs().sum();
}

double purity(const Matrix& rho)
{
    return (rho * rho).trace().real();
}

Matrix projector(const Vector& ket)
{
    return ket * ket.adjoint();
}

Matrix tensor(const Matrix& a, const Matrix& b, Index max_dim)
{
    const Index rows = a.rows() * b.rows();
    const Index cols = a.cols() * b.cols();
    if (rows > max_dim || cols > max_dim) {
        std::ostringstream os;
        os << "tensor: result " << rows << "x" << cols << " exceeds dimension cap " << max_dim;
        throw SizeError(os.str());
    }
    Matrix out(rows, cols);
    out = Eigen::kroneckerProduct(a, b);
    return out;
}

Matrix partial_trace_bath(const Matrix& rho_full, Index d_s, Index d_b)
{
    if (d_s <= 0 || d_b <= 0 || rho_full.rows() != d_s * d_b || rho_full.cols() != d_s * d_b) {
        std::ostringstream os;
        os << "partial_trace_bath: " << rho_full.rows() << "x" << rho_full.cols()
           << " is not factorable as (" << d_s << "*" << d_b << ")^2";
        throw ShapeError(os.str());
    }
    Matrix out = Matrix::Zero(d_s, d_s);
    for (Index f = 0; f < d_s; ++f) {
        for (Index g = 0; g < d_s; ++g) {
            out(f, g) = rho_full.block(f * d_b, g * d_b, d_b, d_b).trace();
        }
    }
    return out;
}

Matrix expm(const Matrix& m, double norm_bound)
{
    if (m.rows() != m.cols()) throw ShapeError("expm: matrix is not square");
    if (m.size() == 0) return m;
    const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
    if (!std::isfinite(norm) || norm > norm_bound) {
        std::ostringstream os;
        os << "expm: 1-norm " << norm << " exceeds bound " << norm_bound;
        throw ConditioningError(os.str());
    }
    Matrix out = m.exp();
    return out;
}

ShiftedSylvesterSolver::ShiftedSylvesterSolver(const Matrix& h_left, const Matrix& h_right)
{
    if (h_left.rows() != h_left.cols() || h_right.rows() != h_right.cols()) {
        throw ShapeError("ShiftedSylvesterSolver: Hamiltonians must be square");
    }
    left_ = eigh(h_left);
    right_ = eigh(h_right);
}

ShiftedSylvesterSolver ShiftedSylvesterSolver::from_spectra(HermitianSpectrum left, HermitianSpectrum right)
{
    ShiftedSylvesterSolver out;
    out.left_ = std::move(left);
    out.right_ = std::move(right);
    return out;
}

Matrix ShiftedSylvesterSolver::solve(cplx z, const Matrix& x) const
{
    const Index m = left_.values.size();
    const Index n = right_.values.size();
    if (x.rows() != m || x.cols() != n) {
        std::ostringstream os;
        os << "solve_shifted_sylvester: right-hand side is " << x.rows() << "x" << x.cols()
           << ", expected " << m << "x" << n;
        throw ShapeError(os.str());
    }
    Matrix y = left_.vectors.adjoint() * x * right_.vectors;
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < m; ++i) {
            const cplx denom = z - kI * (left_.values(i) - right_.values(j));
            if (std::abs(denom) < kResonanceGuard) {
                std::ostringstream os;
                os << "solve_shifted_sylvester: z = " << z << " is resonant with left eigenvalue #" << i
                   << " (" << left_.values(i) << ") and right eigenvalue #" << j << " ("
                   << right_.values(j) << ")";
                throw ResonanceError(os.str(), static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            }
            y(i, j) /= denom;
        }
    }
    return left_.vectors * y * right_.vectors.adjoint();
}

Matrix solve_shifted_sylvester(cplx z, const Matrix& h_left, const Matrix& h_right, const Matrix& x)
{
    return ShiftedSylvesterSolver(h_left, h_right).solve(z, x);
}

Vector vec(const Matrix& op)
{
    return Eigen::Map<const Vector>(op.data(), op.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols)
{
    if (v.size() != rows * cols) throw ShapeError("unvec: length does not match requested shape");
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix unvec(const Vector& v, Index dim)
{
    return unvec(v, dim, dim);
}

Superoperator::Superoperator(Matrix m, Index d) : matrix(std::move(m)), dim(d)
{
    if (matrix.rows() != d * d || matrix.cols() != d * d) {
        throw ShapeError("Superoperator: matrix must be d^2 x d^2");
    }
}

Matrix Superoperator::apply(const Matrix& op) const
{
    if (op.rows() != dim || op.cols() != dim) throw ShapeError("Superoperator::apply: operand shape mismatch");
    return unvec(matrix * vec(op), dim);
}

Superoperator Superoperator::identity(Index d)
{
    return Superoperator(Matrix::Identity(d * d, d * d), d);
}

Matrix left_multiplication(const Matrix& a)
{
    return tensor(Matrix::Identity(a.cols(), a.cols()), a);
}

Matrix right_multiplication(const Matrix& b)
{
    return tensor(b.transpose(), Matrix::Identity(b.rows(), b.rows()));
}

Matrix sandwich(const Matrix& a, const Matrix& b)
{
    return tensor(b.transpose(), a);
}

Superoperator transpose_map(Index d)
{
    Matrix m = Matrix::Zero(d * d, d * d);
    for (Index a = 0; a < d; ++a) {
        for (Index b = 0; b < d; ++b) {
            m(a + b * d, b + a * d) = 1.0;
        }
    }
    return Superoperator(std::move(m), d);
}

Matrix choi_matrix(const Superoperator& s)
{
    const Index d = s.dim;
    Matrix choi = Matrix::Zero(d * d, d * d);
    Matrix unit = Matrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            unit.setZero();
            unit(i, j) = 1.0;
            choi.block(i * d, j * d, d, d) = s.apply(unit);
        }
    }
    return choi;
}

} // namespace semigroup
