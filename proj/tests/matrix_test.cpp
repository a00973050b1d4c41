#include "oqmetro/matrix.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oqmetro/error.hpp"
#include "qubit_oracles.hpp"

using namespace oqmetro;

namespace {

ComplexMatrix reconstruct(const Eigensystem& es) {
    const std::size_t n = es.vectors.dim();
    ComplexMatrix out(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t k = 0; k < n; ++k)
                out(r, c) += es.vectors(r, k) * es.values[k] * std::conj(es.vectors(c, k));
    return out;
}

// Determinant by cofactor expansion; independent of the eigen solver.
cplx determinant(const ComplexMatrix& m) {
    const std::size_t n = m.dim();
    if (n == 1) return m(0, 0);
    cplx det = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        ComplexMatrix minor(n - 1);
        for (std::size_t r = 1; r < n; ++r)
            for (std::size_t k = 0, mk = 0; k < n; ++k)
                if (k != c) minor(r - 1, mk++) = m(r, k);
        det += (c % 2 ? -1.0 : 1.0) * m(0, c) * determinant(minor);
    }
    return det;
}

}  // namespace

TEST(Matrix, is_hermitian_examples) {
    EXPECT_TRUE(is_hermitian(ComplexMatrix::identity(2), 1e-12));
    const ComplexMatrix anti{{0.0, cplx(0, 1)}, {cplx(0, 1), 0.0}};
    EXPECT_FALSE(is_hermitian(anti, 1e-12));
    EXPECT_TRUE(is_hermitian(pauli_x(), 0.0));
}

TEST(Matrix, non_square_initializer_throws) {
    EXPECT_THROW((ComplexMatrix{{1.0, 2.0}, {3.0}}), Error);
}

TEST(Matrix, eigensystem_diagonal_input) {
    const auto es = hermitian_eigensystem(ComplexMatrix::diagonal({3.0, 1.0}));
    ASSERT_EQ(es.values.size(), 2u);
    EXPECT_DOUBLE_EQ(es.values[0], 1.0);
    EXPECT_DOUBLE_EQ(es.values[1], 3.0);
    EXPECT_EQ(es.vectors(1, 0), cplx(1.0));
    EXPECT_EQ(es.vectors(0, 1), cplx(1.0));
    EXPECT_EQ(es.vectors(0, 0), cplx(0.0));
}

TEST(Matrix, eigensystem_pauli_x) {
    const auto es = hermitian_eigensystem(pauli_x());
    EXPECT_NEAR(es.values[0], -1.0, 1e-15);
    EXPECT_NEAR(es.values[1], 1.0, 1e-15);
    const double h = 1.0 / std::sqrt(2.0);
    // Columns equal (|0⟩ ∓ |1⟩)/√2 up to a global phase.
    const cplx o0 = std::conj(es.vectors(0, 0)) * h - std::conj(es.vectors(1, 0)) * h;
    const cplx o1 = std::conj(es.vectors(0, 1)) * h + std::conj(es.vectors(1, 1)) * h;
    EXPECT_NEAR(std::abs(o0), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(o1), 1.0, 1e-14);
}

TEST(Matrix, eigensystem_noisy_projector) {
    const ComplexMatrix m = 0.5 * (ComplexMatrix::identity(2) + 0.5 * pauli_z());
    const auto es = hermitian_eigensystem(m);
    EXPECT_NEAR(es.values[0], 0.25, 1e-15);
    EXPECT_NEAR(es.values[1], 0.75, 1e-15);
    EXPECT_NEAR(std::abs(es.vectors(1, 0)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(es.vectors(0, 1)), 1.0, 1e-15);
}

TEST(Matrix, eigensystem_rejects_non_hermitian) {
    const ComplexMatrix m{{0.0, 1.0}, {0.0, 0.0}};
    try {
        hermitian_eigensystem(m);
        FAIL() << "expected NotHermitian";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
    }
}

TEST(Matrix, is_psd_examples) {
    EXPECT_TRUE(is_psd(ComplexMatrix::identity(2), 0.0));
    EXPECT_FALSE(is_psd(ComplexMatrix::diagonal({1.0, -0.3}), 1e-10));
    // [𝟙 - σz - σx]/4 has eigenvalues (1 ± √2)/4.
    const ComplexMatrix w11 = 0.25 * (ComplexMatrix::identity(2) - pauli_z() - pauli_x());
    EXPECT_FALSE(is_psd(w11, 1e-10));
    const auto es = hermitian_eigensystem(w11);
    EXPECT_NEAR(es.values[0], (1.0 - std::sqrt(2.0)) / 4.0, 1e-15);
    EXPECT_NEAR(es.values[1], (1.0 + std::sqrt(2.0)) / 4.0, 1e-15);
}

TEST(Matrix, psd_sqrt_examples) {
    EXPECT_LE(max_abs_diff(psd_sqrt(ComplexMatrix::identity(2)), ComplexMatrix::identity(2)), 1e-15);
    EXPECT_LE(max_abs_diff(psd_sqrt(ComplexMatrix::diagonal({4.0, 9.0})), ComplexMatrix::diagonal({2.0, 3.0})), 1e-15);
    const ComplexMatrix a0 = 0.5 * (ComplexMatrix::identity(2) + 0.8 * pauli_z());
    EXPECT_LE(max_abs_diff(psd_sqrt(a0), ComplexMatrix::diagonal({std::sqrt(0.9), std::sqrt(0.1)})), 1e-15);
}

TEST(Matrix, psd_sqrt_clamps_rounding_noise_only) {
    EXPECT_NO_THROW(psd_sqrt(ComplexMatrix::diagonal({1.0, -5e-11})));
    EXPECT_EQ(psd_sqrt(ComplexMatrix::diagonal({1.0, -5e-11}))(1, 1), cplx(0.0));
    try {
        psd_sqrt(ComplexMatrix::diagonal({1.0, -1e-6}));
        FAIL() << "expected NotPsd";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotPsd);
    }
}

TEST(MatrixProperty, eigensystem_reconstructs_random_hermitian) {
    std::mt19937_64 rng(2024);
    for (std::size_t dim : {2u, 3u}) {
        for (int i = 0; i < 1000; ++i) {
            const ComplexMatrix m = oracle::random_hermitian(dim, rng);
            const auto es = hermitian_eigensystem(m);
            ASSERT_LE(max_abs_diff(reconstruct(es), m), 1e-10) << "dim " << dim << " sample " << i;
            ASSERT_LE(max_abs_diff(es.vectors.adjoint() * es.vectors, ComplexMatrix::identity(dim)), 1e-10);
            ASSERT_TRUE(std::is_sorted(es.values.begin(), es.values.end()));
            // Trace and determinant are independent checks on the spectrum.
            double tr = 0.0, prod = 1.0;
            for (double v : es.values) {
                tr += v;
                prod *= v;
            }
            ASSERT_NEAR(tr, m.trace().real(), 1e-10);
            ASSERT_NEAR(prod, determinant(m).real(), 1e-9);
        }
    }
}

TEST(MatrixProperty, jacobi_handles_larger_and_degenerate_inputs) {
    std::mt19937_64 rng(7);
    for (std::size_t dim : {4u, 6u, 8u}) {
        const ComplexMatrix m = oracle::random_hermitian(dim, rng);
        EXPECT_LE(max_abs_diff(reconstruct(hermitian_eigensystem(m)), m), 1e-10);
    }
    const auto es = hermitian_eigensystem(ComplexMatrix::identity(3));
    for (double v : es.values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(MatrixProperty, psd_sqrt_squares_back) {
    std::mt19937_64 rng(99);
    for (std::size_t dim : {2u, 3u}) {
        for (int i = 0; i < 300; ++i) {
            const ComplexMatrix m = oracle::random_psd(dim, rng);
            const ComplexMatrix root = psd_sqrt(m);
            ASSERT_TRUE(is_psd(root));
            ASSERT_LE(max_abs_diff(root * root, m), 1e-9);
        }
    }
}

TEST(MatrixProperty, psd_is_stable_under_positive_shift) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> eps(0.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        const ComplexMatrix m = oracle::random_hermitian(i % 2 ? 3 : 2, rng);
        if (!is_psd(m)) continue;
        const ComplexMatrix shifted = m + eps(rng) * ComplexMatrix::identity(m.dim());
        ASSERT_TRUE(is_psd(shifted));
    }
    for (int i = 0; i < 200; ++i) {
        const ComplexMatrix m = oracle::random_psd(2, rng);
        ASSERT_TRUE(is_psd(m + eps(rng) * ComplexMatrix::identity(2)));
    }
}
