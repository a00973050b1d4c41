#include "oqmetro/probe.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "oqmetro/error.hpp"

namespace oqmetro {

std::string_view to_string(Target t) { return t == Target::Polar ? "theta" : "phi"; }

Target parse_target(std::string_view name) {
    if (name == "theta" || name == "polar") return Target::Polar;
    if (name == "phi" || name == "azimuthal") return Target::Azimuthal;
    throw Error(ErrorCode::InvalidConfig, "unknown target '" + std::string(name) + "'");
}

ProbeParams ProbeParams::with_value(double g) const {
    ProbeParams p = *this;
    (target == Target::Polar ? p.theta : p.phi) = g;
    return p;
}

ProbeState make_state(const ProbeParams& p) {
    using std::numbers::pi;
    if (!(p.theta >= 0.0 && p.theta <= pi)) throw Error(ErrorCode::ParamOutOfRange, "theta outside [0, pi]");
    if (!(p.phi >= 0.0 && p.phi < 2.0 * pi)) throw Error(ErrorCode::ParamOutOfRange, "phi outside [0, 2pi)");
    return make_state_unchecked(p);
}

ProbeState make_state_unchecked(const ProbeParams& p) {
    const double c = std::cos(0.5 * p.theta);
    const double s = std::sin(0.5 * p.theta);
    const cplx phase = std::polar(1.0, p.phi);

    ProbeState st;
    st.target = p.target;
    st.amplitudes = {c, phase * s};
    if (p.target == Target::Polar) {
        st.derivative = {-0.5 * s, 0.5 * phase * c};
    } else {
        st.derivative = {0.0, cplx(0.0, 1.0) * phase * s};
    }
    return st;
}

Vec3 bloch_vector(const ProbeState& s) {
    const auto ket = s.ket();
    return {expectation(pauli_x(), ket).real(), expectation(pauli_y(), ket).real(),
            expectation(pauli_z(), ket).real()};
}

}  // namespace oqmetro
