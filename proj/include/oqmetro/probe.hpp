#pragma once

#include <array>
#include <string_view>

#include "oqmetro/matrix.hpp"
#include "oqmetro/measurement.hpp"

namespace oqmetro {

/// Which angle of the probe carries the parameter being estimated.
enum class Target { Polar, Azimuthal };

std::string_view to_string(Target t);
/// Accepts "theta"/"polar" and "phi"/"azimuthal"; throws InvalidConfig.
Target parse_target(std::string_view name);

struct ProbeParams {
    double theta = 0.0;  // [0, π]
    double phi = 0.0;    // [0, 2π)
    Target target = Target::Polar;

    double value() const { return target == Target::Polar ? theta : phi; }
    double other() const { return target == Target::Polar ? phi : theta; }
    /// Copy with the estimated angle replaced by g.
    ProbeParams with_value(double g) const;
};

/// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩ together with its analytic derivative
/// with respect to the target angle.
struct ProbeState {
    std::array<cplx, 2> amplitudes{};
    std::array<cplx, 2> derivative{};
    Target target = Target::Polar;

    std::vector<cplx> ket() const { return {amplitudes[0], amplitudes[1]}; }
    std::vector<cplx> derivative_ket() const { return {derivative[0], derivative[1]}; }
};

/// Throws ParamOutOfRange outside θ ∈ [0,π], φ ∈ [0,2π).
ProbeState make_state(const ProbeParams& p);

/// Same construction without the domain check; finite-difference stencils
/// and likelihood scans step slightly past the domain edges.
ProbeState make_state_unchecked(const ProbeParams& p);

/// ⟨ψ|σ|ψ⟩ = (sinθ cosφ, sinθ sinφ, cosθ).
Vec3 bloch_vector(const ProbeState& s);

}  // namespace oqmetro
