#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "oqmetro/matrix.hpp"

namespace oqmetro {

using Vec3 = std::array<double, 3>;

double norm(const Vec3& v);
double dot(const Vec3& u, const Vec3& v);

/// Generalized measurement: PSD effects summing to the identity. A
/// conjunction over outcome pairs (a,b) stores effect (a,b) at a*d + b.
class Povm {
public:
    /// Validates Hermiticity, positivity and completeness to `tol`; throws
    /// InvalidMeasurement otherwise.
    explicit Povm(std::vector<ComplexMatrix> effects, double tol = kPsdTol);

    std::size_t outcomes() const noexcept { return effects_.size(); }
    std::size_t dim() const noexcept { return effects_.front().dim(); }
    const ComplexMatrix& effect(std::size_t k) const { return effects_.at(k); }
    const std::vector<ComplexMatrix>& effects() const noexcept { return effects_; }

private:
    std::vector<ComplexMatrix> effects_;
};

/// Hermitian operator-valued measure on a d×d outcome grid. Elements must be
/// Hermitian and sum to the identity; positivity is not required.
class Hovm {
public:
    Hovm(std::size_t d, std::vector<ComplexMatrix> elements, double tol = kHermitianTol);

    std::size_t d() const noexcept { return d_; }
    std::size_t dim() const noexcept { return elements_.front().dim(); }
    const ComplexMatrix& element(std::size_t a, std::size_t b) const { return elements_.at(a * d_ + b); }
    const std::vector<ComplexMatrix>& elements() const noexcept { return elements_; }

private:
    std::size_t d_;
    std::vector<ComplexMatrix> elements_;
};

/// Noisy projective qubit measurement (𝟙 ± bloch·σ)/2; |bloch| is the sharpness.
struct BlochPovm {
    Vec3 bloch{};

    double sharpness() const { return norm(bloch); }
    Povm povm() const;
};

/// Two-outcome qubit POVM with effects (𝟙 + (-1)^a bloch·σ)/2.
/// Throws BlochNormExceeded when |bloch| > 1.
Povm bloch_povm(const Vec3& bloch);

/// Measure `first` then `second`: effect (a,b) = √F_a S_b √F_a.
Povm sequential_povm(const Povm& first, const Povm& second);

/// W_ab = C_ab + (A_a - Σ_b C_ab)/d + (B_b - Σ_a C_ab)/d for any d²-outcome
/// conjunction C.
Hovm build_hovm(const Povm& a, const Povm& b, const Povm& conjunction);

/// max over outcomes of ‖Σ_b W_ab - A_a‖max and ‖Σ_a W_ab - B_b‖max.
double marginality_defect(const Hovm& w, const Povm& a, const Povm& b);

/// True when every element of w is PSD within tol, i.e. w is itself a joint
/// measurement for its marginals.
bool hovm_is_povm(const Hovm& w, double tol = kPsdTol);

/// Qubit two-outcome compatibility: |mu+nu| + |mu-nu| <= 2.
bool busch_compatible(const Vec3& mu, const Vec3& nu);

/// Builds W from (A, B, sequential A→B) and checks that its POVM property
/// agrees with the Busch criterion. Always true for valid inputs.
bool busch_equiv_hovm_check(const Vec3& mu, const Vec3& nu);

/// The mutually unbiased pair A = (0,0,λ)·σ, B = (λ,0,0)·σ.
struct UnbiasedPair {
    Vec3 mu;
    Vec3 nu;
};
UnbiasedPair unbiased_pair(double sharpness);

/// HOVM of (A, B, sequential A→B) for the mutually unbiased pair.
Hovm unbiased_pair_hovm(double sharpness);

/// Bisects the common sharpness λ at which the HOVM of (λ·mu_dir, λ·nu_dir,
/// sequential) stops being a POVM. Directions are normalized first; returns
/// 1 when the HOVM is a POVM all the way to λ = 1.
double povm_sharpness_threshold(const Vec3& mu_dir = {0, 0, 1}, const Vec3& nu_dir = {1, 0, 0},
                                double tol = 1e-12);

/// Bloch vector of a two-outcome qubit POVM whose effects have the form
/// (𝟙 ± m·σ)/2, or nullopt when the POVM is biased or not a qubit.
std::optional<Vec3> unbiased_bloch_vector(const Povm& p, double tol = 1e-10);

}  // namespace oqmetro
