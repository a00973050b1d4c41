#include "oqmetro/measurement.hpp"

#include <cmath>
#include <string>

#include "oqmetro/error.hpp"

namespace oqmetro {

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
double dot(const Vec3& u, const Vec3& v) { return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]; }

namespace {

ComplexMatrix sum_of(const std::vector<ComplexMatrix>& ms, std::size_t dim) {
    ComplexMatrix total(dim);
    for (const auto& m : ms) total += m;
    return total;
}

void require_same_dim(const std::vector<ComplexMatrix>& ms, const char* what) {
    if (ms.empty()) throw Error(ErrorCode::InvalidMeasurement, std::string(what) + " has no effects");
    const std::size_t dim = ms.front().dim();
    if (dim == 0) throw Error(ErrorCode::InvalidMeasurement, std::string(what) + " has zero dimension");
    for (const auto& m : ms)
        if (m.dim() != dim) throw Error(ErrorCode::DimensionMismatch, std::string(what) + " effects differ in size");
}

Vec3 combine(const Vec3& u, double su, const Vec3& v, double sv) {
    return {su * u[0] + sv * v[0], su * u[1] + sv * v[1], su * u[2] + sv * v[2]};
}

}  // namespace

Povm::Povm(std::vector<ComplexMatrix> effects, double tol) : effects_(std::move(effects)) {
    require_same_dim(effects_, "POVM");
    for (std::size_t k = 0; k < effects_.size(); ++k) {
        if (!is_hermitian(effects_[k], tol))
            throw Error(ErrorCode::InvalidMeasurement, "POVM effect " + std::to_string(k) + " is not Hermitian");
        if (!is_psd(effects_[k], tol))
            throw Error(ErrorCode::InvalidMeasurement, "POVM effect " + std::to_string(k) + " is not PSD");
    }
    const auto total = sum_of(effects_, dim());
    if (max_abs_diff(total, ComplexMatrix::identity(dim())) > tol)
        throw Error(ErrorCode::InvalidMeasurement, "POVM effects do not sum to identity");
}

Hovm::Hovm(std::size_t d, std::vector<ComplexMatrix> elements, double tol) : d_(d), elements_(std::move(elements)) {
    if (d_ == 0 || elements_.size() != d_ * d_)
        throw Error(ErrorCode::OutcomeCountMismatch, "HOVM needs d*d elements");
    require_same_dim(elements_, "HOVM");
    for (std::size_t k = 0; k < elements_.size(); ++k)
        if (!is_hermitian(elements_[k], tol))
            throw Error(ErrorCode::InvalidMeasurement, "HOVM element " + std::to_string(k) + " is not Hermitian");
    const auto total = sum_of(elements_, dim());
    if (max_abs_diff(total, ComplexMatrix::identity(dim())) > tol)
        throw Error(ErrorCode::InvalidMeasurement, "HOVM elements do not sum to identity");
}

Povm BlochPovm::povm() const { return bloch_povm(bloch); }

Povm bloch_povm(const Vec3& bloch) {
    if (norm(bloch) > 1.0 + 1e-12) throw Error(ErrorCode::BlochNormExceeded, "Bloch vector longer than 1");
    const ComplexMatrix m = bloch[0] * pauli_x() + bloch[1] * pauli_y() + bloch[2] * pauli_z();
    const auto id = ComplexMatrix::identity(2);
    return Povm({0.5 * (id + m), 0.5 * (id - m)});
}

Povm sequential_povm(const Povm& first, const Povm& second) {
    if (first.dim() != second.dim()) throw Error(ErrorCode::DimensionMismatch, "sequential composition");
    std::vector<ComplexMatrix> effects;
    effects.reserve(first.outcomes() * second.outcomes());
    for (const auto& fa : first.effects()) {
        const ComplexMatrix root = psd_sqrt(fa);
        for (const auto& sb : second.effects()) {
            ComplexMatrix e = root * sb * root;
            // Symmetrize away rounding so the result is exactly Hermitian.
            effects.push_back(0.5 * (e + e.adjoint()));
        }
    }
    return Povm(std::move(effects));
}

Hovm build_hovm(const Povm& a, const Povm& b, const Povm& conjunction) {
    const std::size_t d = a.outcomes();
    if (b.outcomes() != d || conjunction.outcomes() != d * d)
        throw Error(ErrorCode::OutcomeCountMismatch, "conjunction must have d*d outcomes for d-outcome locals");
    const std::size_t dim = a.dim();
    if (b.dim() != dim || conjunction.dim() != dim) throw Error(ErrorCode::DimensionMismatch, "build_hovm");

    std::vector<ComplexMatrix> row_sums(d, ComplexMatrix(dim));  // Σ_b C_ab
    std::vector<ComplexMatrix> col_sums(d, ComplexMatrix(dim));  // Σ_a C_ab
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            row_sums[i] += conjunction.effect(i * d + j);
            col_sums[j] += conjunction.effect(i * d + j);
        }

    const double inv_d = 1.0 / static_cast<double>(d);
    std::vector<ComplexMatrix> elements;
    elements.reserve(d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            elements.push_back(conjunction.effect(i * d + j) + inv_d * (a.effect(i) - row_sums[i]) +
                               inv_d * (b.effect(j) - col_sums[j]));
    return Hovm(d, std::move(elements));
}

double marginality_defect(const Hovm& w, const Povm& a, const Povm& b) {
    const std::size_t d = w.d();
    if (a.outcomes() != d || b.outcomes() != d) throw Error(ErrorCode::OutcomeCountMismatch, "marginality_defect");
    if (a.dim() != w.dim() || b.dim() != w.dim()) throw Error(ErrorCode::DimensionMismatch, "marginality_defect");
    double defect = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        ComplexMatrix row(w.dim()), col(w.dim());
        for (std::size_t j = 0; j < d; ++j) {
            row += w.element(k, j);
            col += w.element(j, k);
        }
        defect = std::max({defect, max_abs_diff(row, a.effect(k)), max_abs_diff(col, b.effect(k))});
    }
    return defect;
}

bool hovm_is_povm(const Hovm& w, double tol) {
    for (const auto& e : w.elements())
        if (!is_psd(e, tol)) return false;
    return true;
}

bool busch_compatible(const Vec3& mu, const Vec3& nu) {
    if (norm(mu) > 1.0 + 1e-12 || norm(nu) > 1.0 + 1e-12)
        throw Error(ErrorCode::BlochNormExceeded, "Busch criterion inputs");
    return norm(combine(mu, 1.0, nu, 1.0)) + norm(combine(mu, 1.0, nu, -1.0)) <= 2.0 + 1e-12;
}

bool busch_equiv_hovm_check(const Vec3& mu, const Vec3& nu) {
    const bool busch = busch_compatible(mu, nu);
    const Povm a = bloch_povm(mu);
    const Povm b = bloch_povm(nu);
    return busch == hovm_is_povm(build_hovm(a, b, sequential_povm(a, b)), kPsdTol);
}

UnbiasedPair unbiased_pair(double sharpness) { return {{0.0, 0.0, sharpness}, {sharpness, 0.0, 0.0}}; }

Hovm unbiased_pair_hovm(double sharpness) {
    const auto [mu, nu] = unbiased_pair(sharpness);
    const Povm a = bloch_povm(mu);
    const Povm b = bloch_povm(nu);
    return build_hovm(a, b, sequential_povm(a, b));
}

double povm_sharpness_threshold(const Vec3& mu_dir, const Vec3& nu_dir, double tol) {
    const double mu_norm = norm(mu_dir);
    const double nu_norm = norm(nu_dir);
    if (mu_norm == 0.0 || nu_norm == 0.0) throw Error(ErrorCode::InvalidConfig, "zero direction vector");
    auto is_povm_at = [&](double lambda) {
        const Povm a = bloch_povm(combine(mu_dir, lambda / mu_norm, mu_dir, 0.0));
        const Povm b = bloch_povm(combine(nu_dir, lambda / nu_norm, nu_dir, 0.0));
        return hovm_is_povm(build_hovm(a, b, sequential_povm(a, b)));
    };
    if (is_povm_at(1.0)) return 1.0;
    double lo = 0.0, hi = 1.0;  // POVM at lo, not at hi
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (is_povm_at(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::optional<Vec3> unbiased_bloch_vector(const Povm& p, double tol) {
    if (p.outcomes() != 2 || p.dim() != 2) return std::nullopt;
    const ComplexMatrix& e = p.effect(0);
    if (std::abs(e.trace() - 1.0) > tol) return std::nullopt;
    // e = (𝟙 + m·σ)/2  ⇒  m_k = Tr(e σ_k).
    return Vec3{(e * pauli_x()).trace().real(), (e * pauli_y()).trace().real(), (e * pauli_z()).trace().real()};
}

}  // namespace oqmetro
