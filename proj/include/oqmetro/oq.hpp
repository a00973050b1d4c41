#pragma once

#include <cstddef>
#include <vector>

#include "oqmetro/measurement.hpp"
#include "oqmetro/probe.hpp"

namespace oqmetro {

/// Real d×d quasiprobability table 𝒲(a,b) = ⟨ψ|W_ab|ψ⟩ with its negativity
/// 𝒩 = Σ|𝒲| - 1.
struct OqDistribution {
    std::size_t d = 0;
    std::vector<double> values;  // row-major, index a*d + b
    double negativity = 0.0;

    double operator()(std::size_t a, std::size_t b) const { return values.at(a * d + b); }
    double min_value() const;
};

/// Throws DimensionMismatch, or NonRealValue when Im⟨ψ|W_ab|ψ⟩ > 1e-10.
OqDistribution evaluate_oq(const ProbeState& state, const Hovm& w);

/// ∂_g𝒲(a,b) = 2 Re⟨∂_gψ|W_ab|ψ⟩, same layout as OqDistribution::values.
std::vector<double> oq_derivatives(const ProbeState& state, const Hovm& w);

bool is_positive(const OqDistribution& oq, double tol = kPsdTol);

}  // namespace oqmetro
