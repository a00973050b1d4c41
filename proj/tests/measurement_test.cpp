#include "oqmetro/measurement.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oqmetro/error.hpp"
#include "oqmetro/json_io.hpp"
#include "qubit_oracles.hpp"

using namespace oqmetro;

namespace {

const ComplexMatrix kId = ComplexMatrix::identity(2);

// Hand-written qubit HOVM [𝟙 + λ((-1)^a σz + (-1)^b σx)]/4.
ComplexMatrix closed_form_w(int a, int b, double lambda) {
    const double sa = a ? -1.0 : 1.0, sb = b ? -1.0 : 1.0;
    return 0.25 * (kId + lambda * (sa * pauli_z() + sb * pauli_x()));
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::InvalidConfig;
}

}  // namespace

TEST(BlochPovm, examples) {
    const Povm random = bloch_povm({0, 0, 0});
    EXPECT_LE(max_abs_diff(random.effect(0), 0.5 * kId), 1e-15);
    EXPECT_LE(max_abs_diff(random.effect(1), 0.5 * kId), 1e-15);

    const Povm z = bloch_povm({0, 0, 1});
    EXPECT_LE(max_abs_diff(z.effect(0), ComplexMatrix::diagonal({1, 0})), 1e-15);
    EXPECT_LE(max_abs_diff(z.effect(1), ComplexMatrix::diagonal({0, 1})), 1e-15);

    const Povm x = bloch_povm({0.8, 0, 0});
    EXPECT_LE(max_abs_diff(x.effect(0), ComplexMatrix{{0.5, 0.4}, {0.4, 0.5}}), 1e-15);
    EXPECT_LE(max_abs_diff(x.effect(1), ComplexMatrix{{0.5, -0.4}, {-0.4, 0.5}}), 1e-15);

    EXPECT_DOUBLE_EQ((BlochPovm{{0.6, 0.0, 0.8}}).sharpness(), 1.0);
}

TEST(BlochPovm, rejects_long_vectors) {
    EXPECT_EQ(code_of([] { bloch_povm({0.8, 0.8, 0}); }), ErrorCode::BlochNormExceeded);
}

TEST(Povm, constructor_validates) {
    EXPECT_EQ(code_of([] { Povm({ComplexMatrix::diagonal({1, 0})}); }), ErrorCode::InvalidMeasurement);
    EXPECT_EQ(code_of([] { Povm({ComplexMatrix::diagonal({1.2, 0}), ComplexMatrix::diagonal({-0.2, 1})}); }),
              ErrorCode::InvalidMeasurement);
    EXPECT_EQ(code_of([] { Povm({kId, ComplexMatrix(3)}); }), ErrorCode::DimensionMismatch);
}

TEST(SequentialPovm, examples) {
    const Povm random = bloch_povm({0, 0, 0});
    const Povm seq = sequential_povm(random, random);
    ASSERT_EQ(seq.outcomes(), 4u);
    for (const auto& e : seq.effects()) EXPECT_LE(max_abs_diff(e, 0.25 * kId), 1e-15);

    // Sharp σz then sharp σx: |a⟩⟨a|/2 for both b.
    const Povm sharp = sequential_povm(bloch_povm({0, 0, 1}), bloch_povm({1, 0, 0}));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const ComplexMatrix proj = a ? ComplexMatrix::diagonal({0, 1}) : ComplexMatrix::diagonal({1, 0});
            EXPECT_LE(max_abs_diff(sharp.effect(a * 2 + b), 0.5 * proj), 1e-15);
        }
}

TEST(SequentialPovm, unbiased_pair_at_threshold_matches_hand_oracle) {
    const double lambda = 1.0 / std::sqrt(2.0);
    const auto [mu, nu] = unbiased_pair(lambda);
    const Povm seq = sequential_povm(bloch_povm(mu), bloch_povm(nu));
    const double r = std::sqrt(1.0 - lambda * lambda);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            // [𝟙 + (-1)^a λσz + (-1)^b λ r σx]/4: eigenvalues (1 ± λ√(1 + r²))/4.
            const double sa = a ? -1.0 : 1.0, sb = b ? -1.0 : 1.0;
            const ComplexMatrix expected = 0.25 * (kId + sa * lambda * pauli_z() + sb * lambda * r * pauli_x());
            EXPECT_LE(max_abs_diff(seq.effect(a * 2 + b), expected), 1e-15);
            const double half_gap = lambda * std::sqrt(1.0 + r * r);
            const auto es = hermitian_eigensystem(seq.effect(a * 2 + b));
            EXPECT_NEAR(es.values[0], 0.25 * (1.0 - half_gap), 1e-15);
            EXPECT_NEAR(es.values[1], 0.25 * (1.0 + half_gap), 1e-15);
            EXPECT_GE(es.values[0], 0.0);
        }
}

TEST(SequentialPovm, dimension_mismatch) {
    const Povm qutrit({ComplexMatrix::identity(3)});
    EXPECT_EQ(code_of([&] { sequential_povm(bloch_povm({0, 0, 1}), qutrit); }), ErrorCode::DimensionMismatch);
}

TEST(BuildHovm, qubit_example_closed_form) {
    for (double lambda : {0.0, 0.3, 1.0 / std::sqrt(2.0), 0.9, 1.0}) {
        const Hovm w = unbiased_pair_hovm(lambda);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) EXPECT_LE(max_abs_diff(w.element(a, b), closed_form_w(a, b, lambda)), 1e-15);
    }
}

TEST(BuildHovm, trivial_and_symmetrized_conjunctions) {
    const Povm random = bloch_povm({0, 0, 0});
    const Povm quarter({0.25 * kId, 0.25 * kId, 0.25 * kId, 0.25 * kId});
    const Hovm w = build_hovm(random, random, quarter);
    for (const auto& e : w.elements()) EXPECT_LE(max_abs_diff(e, 0.25 * kId), 1e-15);

    // Conjunction mixing both sequential orders: marginality still holds.
    std::mt19937_64 rng(11);
    const Povm a = bloch_povm(oracle::random_bloch(rng));
    const Povm b = bloch_povm(oracle::random_bloch(rng));
    const Povm ab = sequential_povm(a, b);
    const Povm ba = sequential_povm(b, a);
    std::vector<ComplexMatrix> mixed;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) mixed.push_back(0.5 * (ab.effect(i * 2 + j) + ba.effect(j * 2 + i)));
    EXPECT_LE(marginality_defect(build_hovm(a, b, Povm(mixed)), a, b), 1e-12);
}

TEST(BuildHovm, errors) {
    const Povm a = bloch_povm({0, 0, 1});
    EXPECT_EQ(code_of([&] { build_hovm(a, a, a); }), ErrorCode::OutcomeCountMismatch);
    const Povm three({kId * (1.0 / 3), kId * (1.0 / 3), kId * (1.0 / 3)});
    EXPECT_EQ(code_of([&] { build_hovm(a, three, sequential_povm(a, a)); }), ErrorCode::OutcomeCountMismatch);
}

TEST(BuildHovm, general_d_marginality) {
    // Qubit, three outcomes per side, random conjunction with nine outcomes.
    std::mt19937_64 rng(3);
    const Povm a = oracle::random_povm(3, rng);
    const Povm b = oracle::random_povm(3, rng);
    const Povm c = oracle::random_povm(9, rng);
    const Hovm w = build_hovm(a, b, c);
    EXPECT_EQ(w.d(), 3u);
    EXPECT_LE(marginality_defect(w, a, b), 1e-12);
}

TEST(MarginalityDefect, detects_perturbation) {
    const auto [mu, nu] = unbiased_pair(0.8);
    const Povm a = bloch_povm(mu), b = bloch_povm(nu);
    const Hovm w = unbiased_pair_hovm(0.8);
    EXPECT_LE(marginality_defect(w, a, b), 1e-12);

    auto elements = w.elements();
    elements[0] += 0.01 * kId;
    const Hovm perturbed(2, elements, 0.1);  // loose tolerance lets the defect through
    EXPECT_GE(marginality_defect(perturbed, a, b), 0.01 - 1e-15);
}

TEST(HovmIsPovm, examples) {
    EXPECT_TRUE(hovm_is_povm(unbiased_pair_hovm(0.5)));
    EXPECT_FALSE(hovm_is_povm(unbiased_pair_hovm(1.0)));
    const Povm random = bloch_povm({0, 0, 0});
    EXPECT_TRUE(hovm_is_povm(build_hovm(random, random, sequential_povm(random, random))));
}

TEST(Busch, examples) {
    const double edge = 1.0 / std::sqrt(2.0);
    EXPECT_TRUE(busch_compatible(unbiased_pair(edge).mu, unbiased_pair(edge).nu));
    EXPECT_FALSE(busch_compatible(unbiased_pair(0.8).mu, unbiased_pair(0.8).nu));
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        const Vec3 v = oracle::random_bloch(rng);
        EXPECT_TRUE(busch_compatible(v, v));
    }
    EXPECT_EQ(code_of([] { busch_compatible({1.1, 0, 0}, {0, 0, 0}); }), ErrorCode::BlochNormExceeded);
}

TEST(Busch, equivalence_examples) {
    EXPECT_TRUE(busch_equiv_hovm_check(unbiased_pair(0.5).mu, unbiased_pair(0.5).nu));
    EXPECT_TRUE(busch_compatible(unbiased_pair(0.5).mu, unbiased_pair(0.5).nu));
    EXPECT_TRUE(busch_equiv_hovm_check(unbiased_pair(0.9).mu, unbiased_pair(0.9).nu));
    EXPECT_FALSE(busch_compatible(unbiased_pair(0.9).mu, unbiased_pair(0.9).nu));
}

TEST(MeasurementProperty, constructors_satisfy_povm_invariants) {
    std::mt19937_64 rng(1000);
    for (int i = 0; i < 1000; ++i) {
        const Povm a = bloch_povm(oracle::random_bloch(rng));
        const Povm b = bloch_povm(oracle::random_bloch(rng));
        const Povm s = sequential_povm(a, b);
        for (const Povm* p : {&a, &b, &s}) {
            ComplexMatrix total(2);
            for (const auto& e : p->effects()) {
                ASSERT_TRUE(is_hermitian(e, 1e-10));
                ASSERT_TRUE(is_psd(e, 1e-10));
                total += e;
            }
            ASSERT_LE(max_abs_diff(total, kId), 1e-10);
        }
        // Marginal over the second outcome returns the first POVM.
        for (int x = 0; x < 2; ++x)
            ASSERT_LE(max_abs_diff(s.effect(x * 2) + s.effect(x * 2 + 1), a.effect(x)), 1e-12);
    }
}

TEST(MeasurementProperty, marginality_for_arbitrary_conjunctions) {
    std::mt19937_64 rng(55);
    for (int i = 0; i < 300; ++i) {
        const Povm a = oracle::random_povm(2, rng);
        const Povm b = oracle::random_povm(2, rng);
        const Povm c = i % 2 ? oracle::random_povm(4, rng) : sequential_povm(a, b);
        ASSERT_LE(marginality_defect(build_hovm(a, b, c), a, b), 1e-12);
    }
}

TEST(MeasurementProperty, busch_equivalence_on_unbiased_grid) {
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) {
            const double m = i / 49.0, n = j / 49.0;
            ASSERT_TRUE(busch_equiv_hovm_check({0, 0, m}, {n, 0, 0})) << m << " " << n;
        }
}

TEST(MeasurementProperty, busch_equivalence_on_random_geometries) {
    std::mt19937_64 rng(500);
    int incompatible = 0;
    for (int i = 0; i < 500; ++i) {
        const Vec3 mu = oracle::random_bloch(rng), nu = oracle::random_bloch(rng);
        ASSERT_TRUE(busch_equiv_hovm_check(mu, nu));
        incompatible += !busch_compatible(mu, nu);
    }
    EXPECT_GT(incompatible, 0);  // both branches exercised
}

TEST(MeasurementProperty, bisection_finds_inverse_sqrt_two) {
    EXPECT_NEAR(povm_sharpness_threshold(), 1.0 / std::sqrt(2.0), 1e-9);
    // Any orthogonal pair of directions gives the same threshold.
    EXPECT_NEAR(povm_sharpness_threshold({0, 1, 0}, {0, 0, 3}), 1.0 / std::sqrt(2.0), 1e-9);
    // Parallel directions are always compatible.
    EXPECT_EQ(povm_sharpness_threshold({0, 0, 1}, {0, 0, 1}), 1.0);
}

TEST(MeasurementJson, roundtrip_and_errors) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
        const Povm p = oracle::random_povm(i % 3 + 2, rng);
        const Povm back = povm_from_json(nlohmann::json::parse(povm_to_json(p).dump()));
        ASSERT_EQ(back.outcomes(), p.outcomes());
        for (std::size_t k = 0; k < p.outcomes(); ++k) ASSERT_EQ(max_abs_diff(back.effect(k), p.effect(k)), 0.0);
    }
    const Hovm w = unbiased_pair_hovm(0.9);
    const auto j = hovm_to_json(w);
    EXPECT_EQ(j["d"], 2);
    EXPECT_EQ(j["dim"], 2);
    EXPECT_EQ(j["effects"].size(), 4u);
    EXPECT_EQ(j["effects"][0].size(), 4u);  // row-major [re, im] entries
    const Hovm wb = hovm_from_json(j);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(max_abs_diff(wb.elements()[k], w.elements()[k]), 0.0);
    EXPECT_FALSE(hovm_is_povm(wb));

    auto bad = povm_to_json(bloch_povm({0, 0, 1}));
    bad["d"] = 3;
    EXPECT_EQ(code_of([&] { povm_from_json(bad); }), ErrorCode::OutcomeCountMismatch);
    bad = povm_to_json(bloch_povm({0, 0, 1}));
    bad["effects"][0][0] = {2.0, 0.0};
    EXPECT_EQ(code_of([&] { povm_from_json(bad); }), ErrorCode::InvalidMeasurement);
}
