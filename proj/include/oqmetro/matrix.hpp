#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace oqmetro {

using cplx = std::complex<double>;

/// Dense square complex matrix stored row-major. Sized for the handful of
/// qubit/qutrit operators this library manipulates, not for performance.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

    /// Row-major nested initializer; throws DimensionMismatch if not square.
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix diagonal(const std::vector<double>& diag);

    std::size_t dim() const noexcept { return dim_; }

    cplx& operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
    const cplx& operator()(std::size_t row, std::size_t col) const { return data_[row * dim_ + col]; }

    const std::vector<cplx>& data() const noexcept { return data_; }

    ComplexMatrix adjoint() const;
    cplx trace() const;

    ComplexMatrix& operator+=(const ComplexMatrix& rhs);
    ComplexMatrix& operator-=(const ComplexMatrix& rhs);
    ComplexMatrix& operator*=(cplx scale);

    friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
    friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
    friend ComplexMatrix operator*(ComplexMatrix lhs, cplx scale) { return lhs *= scale; }
    friend ComplexMatrix operator*(cplx scale, ComplexMatrix rhs) { return rhs *= scale; }
    friend ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

private:
    std::size_t dim_ = 0;
    std::vector<cplx> data_;
};

/// Largest entrywise modulus, ‖m‖max.
double max_abs(const ComplexMatrix& m);

/// Largest entrywise modulus of (lhs - rhs).
double max_abs_diff(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

/// ⟨v|m|v⟩ for a column vector v of length m.dim().
cplx expectation(const ComplexMatrix& m, const std::vector<cplx>& v);

/// ⟨u|m|v⟩.
cplx sandwich(const std::vector<cplx>& u, const ComplexMatrix& m, const std::vector<cplx>& v);

// Pauli matrices.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;

bool is_hermitian(const ComplexMatrix& m, double tol);

struct Eigensystem {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // column k pairs with values[k]
};

/// Closed form for dim 2, cyclic Jacobi otherwise. Throws NotHermitian when
/// the input fails is_hermitian(m, kHermitianTol).
Eigensystem hermitian_eigensystem(const ComplexMatrix& m);

/// Minimum eigenvalue is at least -tol.
bool is_psd(const ComplexMatrix& m, double tol = kPsdTol);

/// Principal square root of a PSD matrix. Eigenvalues in [-kPsdTol, 0) are
/// clamped to zero; anything more negative throws NotPsd.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

}  // namespace oqmetro
