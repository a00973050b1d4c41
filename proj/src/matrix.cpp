#include "oqmetro/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "oqmetro/error.hpp"

namespace oqmetro {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NotPsd: return "NotPsd";
        case ErrorCode::InvalidMeasurement: return "InvalidMeasurement";
        case ErrorCode::BlochNormExceeded: return "BlochNormExceeded";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::OutcomeCountMismatch: return "OutcomeCountMismatch";
        case ErrorCode::ParamOutOfRange: return "ParamOutOfRange";
        case ErrorCode::NonRealValue: return "NonRealValue";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::DerivativeNotTraceless: return "DerivativeNotTraceless";
        case ErrorCode::NegativeOq: return "NegativeOq";
        case ErrorCode::ZeroQfi: return "ZeroQfi";
        case ErrorCode::ZeroInformation: return "ZeroInformation";
        case ErrorCode::NegativeCounts: return "NegativeCounts";
        case ErrorCode::FlatLikelihood: return "FlatLikelihood";
        case ErrorCode::ZeroSlope: return "ZeroSlope";
        case ErrorCode::AllTrialsOmitted: return "AllTrialsOmitted";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
    : dim_(rows.size()), data_() {
    data_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
        if (row.size() != dim_) {
            throw Error(ErrorCode::DimensionMismatch, "matrix initializer is not square");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<double>& diag) {
    ComplexMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

cplx ComplexMatrix::trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
    if (rhs.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, "matrix addition");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
    if (rhs.dim_ != dim_) throw Error(ErrorCode::DimensionMismatch, "matrix subtraction");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scale) {
    for (auto& x : data_) x *= scale;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    if (lhs.dim() != rhs.dim()) throw Error(ErrorCode::DimensionMismatch, "matrix product");
    const std::size_t n = lhs.dim();
    ComplexMatrix out(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t k = 0; k < n; ++k) {
            const cplx l = lhs(r, k);
            if (l == cplx{}) continue;
            for (std::size_t c = 0; c < n; ++c) out(r, c) += l * rhs(k, c);
        }
    return out;
}

double max_abs(const ComplexMatrix& m) {
    double best = 0.0;
    for (const auto& x : m.data()) best = std::max(best, std::abs(x));
    return best;
}

double max_abs_diff(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    if (lhs.dim() != rhs.dim()) throw Error(ErrorCode::DimensionMismatch, "matrix difference");
    double best = 0.0;
    for (std::size_t i = 0; i < lhs.data().size(); ++i)
        best = std::max(best, std::abs(lhs.data()[i] - rhs.data()[i]));
    return best;
}

cplx sandwich(const std::vector<cplx>& u, const ComplexMatrix& m, const std::vector<cplx>& v) {
    const std::size_t n = m.dim();
    if (u.size() != n || v.size() != n) throw Error(ErrorCode::DimensionMismatch, "vector length");
    cplx acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        cplx row = 0.0;
        for (std::size_t c = 0; c < n; ++c) row += m(r, c) * v[c];
        acc += std::conj(u[r]) * row;
    }
    return acc;
}

cplx expectation(const ComplexMatrix& m, const std::vector<cplx>& v) { return sandwich(v, m, v); }

ComplexMatrix pauli_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix pauli_y() { return {{0.0, cplx(0, -1)}, {cplx(0, 1), 0.0}}; }
ComplexMatrix pauli_z() { return {{1.0, 0.0}, {0.0, -1.0}}; }

bool is_hermitian(const ComplexMatrix& m, double tol) {
    const std::size_t n = m.dim();
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = r; c < n; ++c)
            if (std::abs(m(r, c) - std::conj(m(c, r))) > tol) return false;
    return true;
}

namespace {

Eigensystem eigensystem_2x2(const ComplexMatrix& m) {
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const cplx c = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
    const double mean = 0.5 * (a + d);
    const double half_gap = 0.5 * (a - d);
    const double radius = std::hypot(half_gap, std::abs(c));

    Eigensystem es{{mean - radius, mean + radius}, ComplexMatrix(2)};
    if (c == cplx{}) {
        // Already diagonal; keep ascending order.
        if (a <= d) {
            es.vectors(0, 0) = 1.0;
            es.vectors(1, 1) = 1.0;
        } else {
            es.vectors(1, 0) = 1.0;
            es.vectors(0, 1) = 1.0;
        }
        es.values = {std::min(a, d), std::max(a, d)};
        return es;
    }
    for (std::size_t k = 0; k < 2; ++k) {
        const double lam = es.values[k];
        // Two candidate null vectors of (m - lam); pick the better conditioned.
        cplx v0 = c, v1 = lam - a;
        cplx w0 = lam - d, w1 = std::conj(c);
        const double nv = std::hypot(std::abs(v0), std::abs(v1));
        const double nw = std::hypot(std::abs(w0), std::abs(w1));
        if (nw > nv) {
            v0 = w0 / nw;
            v1 = w1 / nw;
        } else {
            v0 /= nv;
            v1 /= nv;
        }
        es.vectors(0, k) = v0;
        es.vectors(1, k) = v1;
    }
    return es;
}

double off_diagonal_norm(const ComplexMatrix& m) {
    double acc = 0.0;
    for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = 0; c < m.dim(); ++c)
            if (r != c) acc += std::norm(m(r, c));
    return std::sqrt(acc);
}

Eigensystem eigensystem_jacobi(const ComplexMatrix& input) {
    const std::size_t n = input.dim();
    ComplexMatrix a = input;
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double target = 1e-12 * std::max(1.0, max_abs(input));

    for (int sweep = 0; sweep < 100 && off_diagonal_norm(a) > target; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const cplx phase = apq / mag;
                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * cs;

                // Rotation J acts on columns p,q: A <- J† A J, V <- V J.
                const cplx jpq = sn * phase;
                const cplx jqp = -sn * std::conj(phase);
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * cs + akq * jqp;
                    a(k, q) = akp * jpq + akq * cs;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = cs * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + cs * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * cs + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * cs;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
    Eigensystem es{std::vector<double>(n), ComplexMatrix(n)};
    for (std::size_t k = 0; k < n; ++k) {
        es.values[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) es.vectors(r, k) = v(r, order[k]);
    }
    return es;
}

}  // namespace

Eigensystem hermitian_eigensystem(const ComplexMatrix& m) {
    if (m.dim() == 0) throw Error(ErrorCode::DimensionMismatch, "empty matrix");
    if (!is_hermitian(m, kHermitianTol)) throw Error(ErrorCode::NotHermitian, "eigensystem input");
    if (m.dim() == 1) return {{m(0, 0).real()}, ComplexMatrix::identity(1)};
    if (m.dim() == 2) return eigensystem_2x2(m);
    return eigensystem_jacobi(m);
}

bool is_psd(const ComplexMatrix& m, double tol) {
    if (!is_hermitian(m, std::max(tol, kHermitianTol))) {
        throw Error(ErrorCode::NotHermitian, "is_psd input");
    }
    return hermitian_eigensystem(m).values.front() >= -tol;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
    const Eigensystem es = hermitian_eigensystem(m);
    const std::size_t n = m.dim();
    std::vector<double> roots(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = es.values[k];
        if (lam < -kPsdTol) {
            throw Error(ErrorCode::NotPsd, "eigenvalue " + std::to_string(lam) + " below clamp threshold");
        }
        roots[k] = std::sqrt(std::max(lam, 0.0));
    }
    ComplexMatrix out(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc += es.vectors(r, k) * roots[k] * std::conj(es.vectors(c, k));
            out(r, c) = acc;
        }
    return out;
}

}  // namespace oqmetro
