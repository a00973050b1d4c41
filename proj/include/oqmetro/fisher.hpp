#pragma once

#include <cstdint>
#include <span>

#include "oqmetro/measurement.hpp"
#include "oqmetro/probe.hpp"

namespace oqmetro {

/// Fisher information value. Divergent information (a zero-probability cell
/// with nonzero slope) is reported as diverged with value +∞; no finite
/// overflow value is ever produced.
struct FisherResult {
    double value = 0.0;
    bool diverged = false;

    static FisherResult finite(double v) { return {v, false}; }
    static FisherResult divergent();
};

inline constexpr double kZeroProbability = 1e-12;
inline constexpr double kZeroSlope = 1e-9;

/// Σ derivs²/probs. Cells with probability ≤ 1e-12 contribute 0 when their
/// slope is ≤ 1e-9 and make the result diverge otherwise.
/// Throws NotNormalized / DerivativeNotTraceless beyond 1e-9.
FisherResult fisher_discrete(std::span<const double> probs, std::span<const double> derivs);

/// Fisher information of the OQ of w on the probe. Throws NegativeOq when the
/// OQ at params has negativity above 1e-10.
FisherResult oqfi(const ProbeParams& params, const Hovm& w);

/// 4(⟨∂ψ|∂ψ⟩ - |⟨ψ|∂ψ⟩|²) for the pure probe.
double qfi_pure(const ProbeParams& params);

/// log10(OQFI / (2·QFI)); +∞ when the OQFI diverges. Throws ZeroQfi.
double advantage(const ProbeParams& params, const Hovm& w);

/// Cramér–Rao bound 1/(n·I); zero for divergent information.
/// Throws ZeroInformation when I is not positive.
double cri_bound(const FisherResult& fi, std::uint64_t n);

}  // namespace oqmetro
