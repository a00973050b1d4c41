#include "oqmetro/estimation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "oqmetro/error.hpp"
#include "oqmetro/fisher.hpp"
#include "oqmetro/oq.hpp"

namespace oqmetro {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, std::uint64_t setting) {
    return splitmix64(splitmix64(splitmix64(master) ^ trial) ^ (setting + 0x632be59bd9b4e019ULL));
}

std::vector<std::uint64_t> sample_multinomial(std::uint64_t n, std::span<const double> probs, std::mt19937_64& rng) {
    std::vector<std::uint64_t> out(probs.size(), 0);
    double remaining_mass = 0.0;
    for (double p : probs) remaining_mass += std::max(p, 0.0);
    std::uint64_t remaining = n;
    for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
        const double p = std::max(probs[i], 0.0);
        if (i + 1 == probs.size() || p >= remaining_mass) {
            out[i] = remaining;
            remaining = 0;
            break;
        }
        const double q = std::clamp(p / remaining_mass, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> draw(remaining, q);
        out[i] = draw(rng);
        remaining -= out[i];
        remaining_mass -= p;
    }
    return out;
}

CountTable CountTable::assemble(std::uint64_t n, const std::array<double, 2>& counts_b,
                                const std::array<double, 4>& counts_seq) {
    CountTable t;
    t.n = n;
    t.counts_b = counts_b;
    t.counts_seq = counts_seq;
    for (std::size_t b = 0; b < 2; ++b) {
        const double marginal = counts_seq[b] + counts_seq[2 + b];
        for (std::size_t a = 0; a < 2; ++a)
            t.counts_w[a * 2 + b] = counts_seq[a * 2 + b] + 0.5 * (counts_b[b] - marginal);
    }
    return t;
}

bool CountTable::has_negative() const {
    return std::any_of(counts_w.begin(), counts_w.end(), [](double c) { return c < 0.0; });
}

namespace {

constexpr std::uint64_t kSettingB = 0;
constexpr std::uint64_t kSettingSequential = 1;

struct SettingProbabilities {
    std::array<double, 2> b{};
    std::array<double, 4> seq{};
};

SettingProbabilities setting_probabilities(const ProbeParams& truth, const Povm& a, const Povm& b) {
    if (a.outcomes() != 2 || b.outcomes() != 2) throw Error(ErrorCode::OutcomeCountMismatch, "two-outcome locals");
    const auto ket = make_state(truth).ket();
    const Povm seq = sequential_povm(a, b);
    SettingProbabilities p;
    for (std::size_t k = 0; k < 2; ++k) p.b[k] = std::max(expectation(b.effect(k), ket).real(), 0.0);
    for (std::size_t k = 0; k < 4; ++k) p.seq[k] = std::max(expectation(seq.effect(k), ket).real(), 0.0);
    return p;
}

ProbeParams model_params(double g, double fixed_other, Target target) {
    ProbeParams p;
    p.target = target;
    p.theta = target == Target::Polar ? g : fixed_other;
    p.phi = target == Target::Polar ? fixed_other : g;
    return p;
}

void require_qubit_pair_hovm(const Hovm& w) {
    if (w.d() != 2 || w.dim() != 2) throw Error(ErrorCode::OutcomeCountMismatch, "estimators need a 2x2 qubit HOVM");
}

void require_nonnegative(const CountTable& counts) {
    if (counts.has_negative()) throw Error(ErrorCode::NegativeCounts, "c(a,b|W) has a negative entry");
}

void require_domain(Interval domain) {
    if (!(domain.hi > domain.lo)) throw Error(ErrorCode::InvalidConfig, "empty search domain");
}

// Maximizes f on [lo, hi]: scan a grid, keep the first (smallest g) best
// point, then golden-section inside the neighbouring grid cells.
template <typename F>
double maximize_1d(F&& f, Interval domain, const SearchOptions& opts) {
    const double step = opts.grid_step;
    const auto cells = static_cast<std::size_t>(std::ceil((domain.hi - domain.lo) / step));
    double best_g = domain.lo;
    double best_v = f(domain.lo);
    for (std::size_t k = 1; k <= cells; ++k) {
        const double g = std::min(domain.lo + static_cast<double>(k) * step, domain.hi);
        const double v = f(g);
        if (v > best_v) {
            best_v = v;
            best_g = g;
        }
    }

    double lo = std::max(domain.lo, best_g - step);
    double hi = std::min(domain.hi, best_g + step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > opts.tolerance) {
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    const double refined = 0.5 * (lo + hi);
    return f(refined) >= best_v ? refined : best_g;
}

}  // namespace

CountTable sample_counts(const ProbeParams& truth, const Povm& a, const Povm& b, std::uint64_t n,
                         std::uint64_t seed) {
    if (n == 0) throw Error(ErrorCode::InvalidConfig, "n must be positive");
    const auto p = setting_probabilities(truth, a, b);

    std::mt19937_64 rng_b(derive_seed(seed, 0, kSettingB));
    std::mt19937_64 rng_seq(derive_seed(seed, 0, kSettingSequential));
    const auto cb = sample_multinomial(n, p.b, rng_b);
    const auto cs = sample_multinomial(n, p.seq, rng_seq);

    std::array<double, 2> counts_b{};
    std::array<double, 4> counts_seq{};
    for (std::size_t k = 0; k < 2; ++k) counts_b[k] = static_cast<double>(cb[k]);
    for (std::size_t k = 0; k < 4; ++k) counts_seq[k] = static_cast<double>(cs[k]);
    return CountTable::assemble(n, counts_b, counts_seq);
}

CountTable expected_counts(const ProbeParams& truth, const Povm& a, const Povm& b, std::uint64_t n) {
    const auto p = setting_probabilities(truth, a, b);
    const double nd = static_cast<double>(n);
    std::array<double, 2> counts_b{};
    std::array<double, 4> counts_seq{};
    for (std::size_t k = 0; k < 2; ++k) counts_b[k] = nd * p.b[k];
    for (std::size_t k = 0; k < 4; ++k) counts_seq[k] = nd * p.seq[k];
    return CountTable::assemble(n, counts_b, counts_seq);
}

double log_likelihood(const CountTable& counts, double g, double fixed_other, Target target, const Hovm& w) {
    require_qubit_pair_hovm(w);
    require_nonnegative(counts);
    const ProbeState s = make_state_unchecked(model_params(g, fixed_other, target));
    const auto ket = s.ket();
    double acc = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        if (counts.counts_w[k] == 0.0) continue;
        const double model = expectation(w.elements()[k], ket).real();
        acc += counts.counts_w[k] * std::log(std::max(model, kModelFloor));
    }
    return acc / static_cast<double>(counts.n);
}

TrialResult mle_estimate(const CountTable& counts, Target target, double fixed_other, const Hovm& w,
                         Interval domain, const SearchOptions& opts) {
    require_qubit_pair_hovm(w);
    require_nonnegative(counts);
    require_domain(domain);
    auto ll = [&](double g) { return log_likelihood(counts, g, fixed_other, target, w); };

    TrialResult r;
    r.estimate = maximize_1d(ll, domain, opts);
    const double h = opts.curvature_step;
    const double centre = ll(r.estimate);
    r.observed_fi = -(ll(r.estimate + h) - 2.0 * centre + ll(r.estimate - h)) / (h * h);
    // Below this the second difference is rounding noise.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(centre)) / (h * h);
    if (!(r.observed_fi > noise)) {
        throw Error(ErrorCode::FlatLikelihood, "observed information " + std::to_string(r.observed_fi));
    }
    r.variance_estimate = 1.0 / (static_cast<double>(counts.n) * r.observed_fi);
    return r;
}

namespace {

constexpr std::array<double, 4> kObservableSigns{1.0, 1.0, 1.0, -1.0};  // (-1)^{ab}

struct ObservableAt {
    double mean;
    double slope;
};

ObservableAt observable_at(double g, double fixed_other, Target target, const Hovm& w) {
    const ProbeState s = make_state_unchecked(model_params(g, fixed_other, target));
    const auto ket = s.ket();
    const auto dket = s.derivative_ket();
    ObservableAt o{0.0, 0.0};
    for (std::size_t k = 0; k < 4; ++k) {
        o.mean += kObservableSigns[k] * expectation(w.elements()[k], ket).real();
        o.slope += kObservableSigns[k] * 2.0 * sandwich(dket, w.elements()[k], ket).real();
    }
    return o;
}

}  // namespace

double observable_mean(double g, double fixed_other, Target target, const Hovm& w) {
    require_qubit_pair_hovm(w);
    return observable_at(g, fixed_other, target, w).mean;
}

TrialResult lep_estimate(const CountTable& counts, Target target, double fixed_other, const Hovm& w,
                         Interval domain, const SearchOptions& opts) {
    require_qubit_pair_hovm(w);
    require_nonnegative(counts);
    require_domain(domain);

    double observed = 0.0;
    for (std::size_t k = 0; k < 4; ++k) observed += kObservableSigns[k] * counts.counts_w[k];
    observed /= static_cast<double>(counts.n);

    auto residual = [&](double g) {
        const double diff = observable_at(g, fixed_other, target, w).mean - observed;
        return -diff * diff;
    };

    TrialResult r;
    r.estimate = maximize_1d(residual, domain, opts);
    const ObservableAt at = observable_at(r.estimate, fixed_other, target, w);
    if (std::abs(at.slope) <= kZeroSlope) {
        throw Error(ErrorCode::ZeroSlope, "observable mean is flat at the estimate");
    }
    const double variance = std::max(1.0 - at.mean * at.mean, 0.0);
    r.observed_fi = at.slope * at.slope / variance;
    r.variance_estimate = variance / (static_cast<double>(counts.n) * at.slope * at.slope);
    return r;
}

std::string_view to_string(Estimator e) { return e == Estimator::Mle ? "mle" : "lep"; }

unsigned resolve_threads(unsigned requested) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (requested > 0) return requested;
    if (const char* env = std::getenv("OQMETRO_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return std::min<unsigned>(static_cast<unsigned>(v), hw);
    }
    return hw;
}

namespace {

// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

EstimatorSummary summarize(Estimator which, const std::vector<TrialResult>& results, const TrialSummary& ts) {
    EstimatorSummary s;
    s.estimator = which;
    CompensatedSum est_sum, var_sum;
    for (const auto& r : results) {
        if (r.omitted) continue;
        ++s.used;
        est_sum.add(r.estimate);
        var_sum.add(r.variance_estimate);
    }
    s.omission_rate = 1.0 - static_cast<double>(s.used) / static_cast<double>(results.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (s.used < 2) {
        s.mean_estimate = s.used ? est_sum.value() : nan;
        s.emp_var = s.pred_var = s.ratio = nan;
        return s;
    }
    const double used = static_cast<double>(s.used);
    s.mean_estimate = est_sum.value() / used;
    s.pred_var = var_sum.value() / used;
    CompensatedSum sq;
    for (const auto& r : results)
        if (!r.omitted) sq.add((r.estimate - s.mean_estimate) * (r.estimate - s.mean_estimate));
    s.emp_var = sq.value() / (used - 1.0);

    const double var =
        ts.config.mode == SamplingMode::ExpectedCounts ? s.pred_var : s.emp_var;
    s.ratio = var > 0.0 ? std::log10(ts.qfi_variance / (2.0 * var)) : std::numeric_limits<double>::infinity();
    return s;
}

}  // namespace

TrialSummary run_trials(const TrialConfig& config) {
    if (config.trials < 2) throw Error(ErrorCode::InvalidConfig, "need at least two trials");
    if (config.n == 0) throw Error(ErrorCode::InvalidConfig, "n must be positive");
    if (!(config.lambda >= 0.0 && config.lambda <= 1.0)) throw Error(ErrorCode::InvalidConfig, "lambda outside [0,1]");
    require_domain(config.domain);

    TrialSummary ts;
    ts.config = config;
    ts.qfi = qfi_pure(config.truth);
    if (ts.qfi <= 1e-14) throw Error(ErrorCode::ZeroQfi, "QFI vanishes at the true parameter");
    ts.qfi_variance = 1.0 / (static_cast<double>(config.n) * ts.qfi);

    const auto [mu, nu] = unbiased_pair(config.lambda);
    const Povm a = bloch_povm(mu);
    const Povm b = bloch_povm(nu);
    const Hovm w = build_hovm(a, b, sequential_povm(a, b));
    const Target target = config.truth.target;
    const double other = config.truth.other();

    ts.mle_trials.assign(config.trials, TrialResult{});
    ts.lep_trials.assign(config.trials, TrialResult{});

    auto run_one = [&](std::size_t t) {
        const CountTable counts = config.mode == SamplingMode::Sampled
                                      ? sample_counts(config.truth, a, b, config.n, derive_seed(config.seed, t, 0))
                                      : expected_counts(config.truth, a, b, config.n);
        TrialResult& mle = ts.mle_trials[t];
        TrialResult& lep = ts.lep_trials[t];
        if (counts.has_negative()) {
            mle.omitted = lep.omitted = true;
            return;
        }
        try {
            mle = mle_estimate(counts, target, other, w, config.domain, config.search);
        } catch (const Error&) {
            mle.omitted = true;
        }
        try {
            lep = lep_estimate(counts, target, other, w, config.domain, config.search);
        } catch (const Error&) {
            lep.omitted = true;
        }
    };

    const unsigned workers = std::min<unsigned>(resolve_threads(config.threads),
                                                static_cast<unsigned>(config.trials));
    if (workers <= 1) {
        for (std::size_t t = 0; t < config.trials; ++t) run_one(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < workers; ++i)
            pool.emplace_back([&] {
                for (std::size_t t = next++; t < config.trials; t = next++) run_one(t);
            });
        for (auto& th : pool) th.join();
    }

    ts.mle = summarize(Estimator::Mle, ts.mle_trials, ts);
    ts.lep = summarize(Estimator::Lep, ts.lep_trials, ts);
    if (ts.mle.used < 2 && ts.lep.used < 2) {
        throw Error(ErrorCode::AllTrialsOmitted, "fewer than two usable trials for every estimator");
    }
    return ts;
}

}  // namespace oqmetro
