#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "grid.hpp"
#include "oqmetro/error.hpp"
#include "oqmetro/estimation.hpp"
#include "oqmetro/fisher.hpp"
#include "oqmetro/json_io.hpp"
#include "oqmetro/oq.hpp"

namespace oqmetro::cli {

namespace {

using nlohmann::json;

constexpr const char* kSchemaVersion = "v1";

enum class Format { Csv, Json };

struct Common {
    std::string target = "theta";
    std::string lambda;
    std::string theta;
    std::string phi;
    std::uint64_t n = 100000;
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
    unsigned threads = 0;
};

void add_common(CLI::App* sub, Common& c, bool with_sampling) {
    sub->add_option("--target", c.target, "Estimated angle: theta or phi")->capture_default_str();
    sub->add_option("--lambda", c.lambda, "Sharpness value(s) or range start:stop:step");
    sub->add_option("--theta", c.theta, "Polar angle value(s) or range");
    sub->add_option("--phi", c.phi, "Azimuthal angle value(s) or range");
    if (with_sampling) {
        sub->add_option("--n", c.n, "Samples per measurement setting")->capture_default_str();
        sub->add_option("--trials", c.trials, "Monte-Carlo repetitions")->capture_default_str();
    }
    sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    sub->add_option("--out", c.out, "Output path (default stdout)");
    sub->add_option("--format", c.format, "csv or json")->capture_default_str();
    sub->add_option("--threads", c.threads, "Worker threads (default OQMETRO_THREADS or all cores)");
}

Format parse_format(const std::string& f) {
    if (f == "csv") return Format::Csv;
    if (f == "json") return Format::Json;
    throw Error(ErrorCode::InvalidConfig, "format must be csv or json");
}

std::vector<double> grid_or(const std::string& text, std::vector<double> fallback) {
    return text.empty() ? fallback : parse_grid(text);
}

void check_theta(const std::vector<double>& v) {
    for (double x : v)
        if (!(x >= 0.0 && x <= std::numbers::pi)) throw Error(ErrorCode::InvalidConfig, "theta outside [0, pi]");
}

void check_phi(const std::vector<double>& v) {
    for (double x : v)
        if (!(x >= 0.0 && x < 2.0 * std::numbers::pi)) throw Error(ErrorCode::InvalidConfig, "phi outside [0, 2pi)");
}

void check_lambda(const std::vector<double>& v) {
    for (double x : v)
        if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::InvalidConfig, "lambda outside [0, 1]");
}

// Evaluates fn(i) for i in [0, count) on a worker pool; callers store results
// by index so output order never depends on scheduling.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

// A table of string cells, emitted either as CSV (schema comment first) or
// as a JSON object holding one record per row.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> numeric;  // columns emitted as JSON numbers

    void write(std::ostream& os, Format format) const {
        if (format == Format::Csv) {
            os << "# oqmetro " << name << " schema " << kSchemaVersion << '\n';
            write_line(os, columns);
            for (const auto& r : rows) write_line(os, r);
            return;
        }
        json records = json::array();
        for (const auto& r : rows) {
            json rec = json::object();
            for (std::size_t k = 0; k < columns.size(); ++k) rec[columns[k]] = cell_json(columns[k], r[k]);
            records.push_back(rec);
        }
        os << json{{"schema", "oqmetro/" + name + "/" + kSchemaVersion}, {"rows", records}}.dump(2) << '\n';
    }

private:
    static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
        os << '\n';
    }

    json cell_json(const std::string& column, const std::string& cell) const {
        if (cell.empty()) return nullptr;
        if (cell == "true") return true;
        if (cell == "false") return false;
        if (cell == "inf" || cell == "-inf") return cell;
        if (std::find(numeric.begin(), numeric.end(), column) != numeric.end()) return std::stod(cell);
        return cell;
    }
};

class Output {
public:
    explicit Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw Error(ErrorCode::InvalidConfig, "cannot open output file " + path);
            stream_ = &file_;
        }
    }
    std::ostream& stream() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

std::string fmt(double v) { return format_number(v); }

// ---------------------------------------------------------------------------

int cmd_fi_sweep(const Common& c, std::ostream& out) {
    const Format format = parse_format(c.format);
    const Target target = parse_target(c.target);
    const auto lambdas = grid_or(c.lambda, parse_grid("0:0.995:0.005"));
    const auto thetas = grid_or(c.theta, {std::numbers::pi / 2});
    const auto phis = grid_or(c.phi, {0.0});
    check_lambda(lambdas);
    check_theta(thetas);
    check_phi(phis);

    Table table{"fi-sweep", {"lambda", "theta", "phi", "target", "oqfi", "qfi", "negativity", "positive"}, {},
                {"lambda", "theta", "phi", "oqfi", "qfi", "negativity"}};
    const std::size_t per_lambda = thetas.size() * phis.size();
    table.rows.resize(lambdas.size() * per_lambda);

    parallel_for(lambdas.size(), c.threads, [&](std::size_t li) {
        const double lambda = lambdas[li];
        const Hovm w = unbiased_pair_hovm(lambda);
        std::size_t row = li * per_lambda;
        for (double theta : thetas)
            for (double phi : phis) {
                const ProbeParams p{theta, phi, target};
                const OqDistribution oq = evaluate_oq(make_state(p), w);
                const bool positive = is_positive(oq);
                std::string oqfi_cell;
                if (positive) {
                    const FisherResult fi = oqfi(p, w);
                    oqfi_cell = fi.diverged ? "inf" : fmt(fi.value);
                }
                table.rows[row++] = {fmt(lambda), fmt(theta), fmt(phi), std::string(to_string(target)), oqfi_cell,
                                     fmt(qfi_pure(p)), fmt(oq.negativity), positive ? "true" : "false"};
            }
    });
    Output o(c.out, out);
    table.write(o.stream(), format);
    return kExitOk;
}

int cmd_advantage_map(const Common& c, std::ostream& out) {
    const Format format = parse_format(c.format);
    const Target target = parse_target(c.target);
    const auto lambdas = grid_or(c.lambda, {0.995});
    if (lambdas.size() != 1) throw Error(ErrorCode::InvalidConfig, "advantage-map takes a single lambda");
    check_lambda(lambdas);
    const auto thetas = grid_or(c.theta, parse_grid("0:pi:pi/60"));
    const auto phis = grid_or(c.phi, parse_grid("0:pi:pi/60"));
    check_theta(thetas);
    check_phi(phis);

    const Hovm w = unbiased_pair_hovm(lambdas.front());
    Table table{"advantage-map", {"theta", "phi", "advantage", "negativity"}, {},
                {"theta", "phi", "advantage", "negativity"}};
    table.rows.resize(thetas.size() * phis.size());
    parallel_for(thetas.size(), c.threads, [&](std::size_t ti) {
        for (std::size_t pi = 0; pi < phis.size(); ++pi) {
            const ProbeParams p{thetas[ti], phis[pi], target};
            const OqDistribution oq = evaluate_oq(make_state(p), w);
            std::string adv;
            if (is_positive(oq) && qfi_pure(p) > 1e-14) adv = fmt(advantage(p, w));
            table.rows[ti * phis.size() + pi] = {fmt(p.theta), fmt(p.phi), adv, fmt(oq.negativity)};
        }
    });
    Output o(c.out, out);
    table.write(o.stream(), format);
    return kExitOk;
}

struct EstimateExtras {
    std::string segment;
    std::size_t points = 5;
    std::string domain;
    std::string mode = "sampled";
};

int cmd_estimate(const Common& c, const EstimateExtras& x, std::ostream& out, std::ostream& err) {
    const Format format = parse_format(c.format);
    const Target target = parse_target(c.target);
    if (c.trials < 2) throw Error(ErrorCode::InvalidConfig, "trials must be at least 2");
    if (c.n == 0) throw Error(ErrorCode::InvalidConfig, "n must be positive");
    const auto lambdas = grid_or(c.lambda, {0.9});
    check_lambda(lambdas);

    std::vector<std::pair<double, double>> points;
    if (!x.segment.empty()) {
        // θ1,φ1:θ2,φ2 sampled at `points` evenly spaced positions.
        const auto colon = x.segment.find(':');
        if (colon == std::string::npos || x.points < 1) throw Error(ErrorCode::InvalidConfig, "segment is th1,ph1:th2,ph2");
        const auto p1 = parse_grid(x.segment.substr(0, colon));
        const auto p2 = parse_grid(x.segment.substr(colon + 1));
        if (p1.size() != 2 || p2.size() != 2) throw Error(ErrorCode::InvalidConfig, "segment is th1,ph1:th2,ph2");
        for (std::size_t k = 0; k < x.points; ++k) {
            const double t = x.points == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(x.points - 1);
            points.emplace_back(p1[0] + t * (p2[0] - p1[0]), p1[1] + t * (p2[1] - p1[1]));
        }
    } else {
        for (double th : grid_or(c.theta, {std::numbers::pi / 2}))
            for (double ph : grid_or(c.phi, {0.0})) points.emplace_back(th, ph);
    }
    for (const auto& [th, ph] : points) {
        check_theta({th});
        check_phi({ph});
    }

    Interval domain{0.0, std::numbers::pi};
    if (!x.domain.empty()) {
        const auto colon = x.domain.find(':');
        if (colon == std::string::npos) throw Error(ErrorCode::InvalidConfig, "domain is lo:hi");
        domain = {parse_angle(x.domain.substr(0, colon)), parse_angle(x.domain.substr(colon + 1))};
    }
    SamplingMode mode;
    if (x.mode == "sampled") mode = SamplingMode::Sampled;
    else if (x.mode == "expected") mode = SamplingMode::ExpectedCounts;
    else throw Error(ErrorCode::InvalidConfig, "mode must be sampled or expected");

    Table table{"estimate",
                {"target", "theta0", "phi0", "lambda", "n", "trials", "estimator", "mean_estimate", "emp_var",
                 "pred_var", "omission_rate", "ratio", "advantage"},
                {},
                {"theta0", "phi0", "lambda", "n", "trials", "mean_estimate", "emp_var", "pred_var", "omission_rate",
                 "ratio", "advantage"}};
    int status = kExitOk;
    std::size_t point_index = 0;
    for (double lambda : lambdas) {
        const Hovm w = unbiased_pair_hovm(lambda);
        for (const auto& [th, ph] : points) {
            TrialConfig cfg;
            cfg.truth = {th, ph, target};
            cfg.lambda = lambda;
            cfg.n = c.n;
            cfg.trials = c.trials;
            cfg.seed = derive_seed(c.seed, point_index++, 0xE57);
            cfg.domain = domain;
            cfg.mode = mode;
            cfg.threads = c.threads;

            std::string adv;
            const OqDistribution oq = evaluate_oq(make_state(cfg.truth), w);
            if (is_positive(oq)) adv = fmt(advantage(cfg.truth, w));

            auto row = [&](const EstimatorSummary* s, Estimator e) {
                std::vector<std::string> r{std::string(to_string(target)), fmt(th), fmt(ph), fmt(lambda),
                                           std::to_string(c.n), std::to_string(c.trials),
                                           std::string(to_string(e))};
                if (s) {
                    for (double v : {s->mean_estimate, s->emp_var, s->pred_var, s->omission_rate, s->ratio})
                        r.push_back(fmt(v));
                } else {
                    r.insert(r.end(), {"", "", "", "1", ""});
                }
                r.push_back(adv);
                table.rows.push_back(std::move(r));
            };
            try {
                const TrialSummary ts = run_trials(cfg);
                for (const EstimatorSummary* s : {&ts.mle, &ts.lep}) {
                    if (s->used < 2) {
                        err << "estimate: " << to_string(s->estimator) << " has fewer than two usable trials at theta="
                            << fmt(th) << " phi=" << fmt(ph) << " lambda=" << fmt(lambda) << '\n';
                        status = kExitStatistical;
                    }
                    row(s, s->estimator);
                }
            } catch (const Error& e) {
                if (e.code() != ErrorCode::AllTrialsOmitted) throw;
                err << "estimate: all trials omitted at theta=" << fmt(th) << " phi=" << fmt(ph)
                    << " lambda=" << fmt(lambda) << '\n';
                status = kExitStatistical;
                row(nullptr, Estimator::Mle);
                row(nullptr, Estimator::Lep);
            }
        }
    }
    Output o(c.out, out);
    table.write(o.stream(), format);
    return status;
}

struct CompatOptions {
    std::string mu;
    std::string nu;
    std::string lambda;
    std::string povm_a;
    std::string povm_b;
    std::string conjunction;
    std::string dump_hovm;
    std::string out;
};

std::optional<Vec3> parse_vec3(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto v = parse_grid(text);
    if (v.size() != 3) throw Error(ErrorCode::InvalidConfig, "Bloch vectors take three components");
    return Vec3{v[0], v[1], v[2]};
}

Povm read_povm_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read " + path);
    try {
        return povm_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
    }
}

int cmd_compat(const CompatOptions& o, std::ostream& out, std::ostream& err) {
    std::optional<Povm> a, b;
    std::optional<Vec3> mu = parse_vec3(o.mu), nu = parse_vec3(o.nu);
    bool unbiased_geometry = false;

    if (!o.lambda.empty()) {
        if (mu || nu || !o.povm_a.empty() || !o.povm_b.empty())
            throw Error(ErrorCode::InvalidConfig, "--lambda excludes --mu/--nu/--povm-a/--povm-b");
        const auto l = parse_grid(o.lambda);
        if (l.size() != 1) throw Error(ErrorCode::InvalidConfig, "compat takes a single lambda");
        const auto pair = unbiased_pair(l.front());
        mu = pair.mu;
        nu = pair.nu;
    }
    if (!o.povm_a.empty() || !o.povm_b.empty()) {
        if (o.povm_a.empty() || o.povm_b.empty() || mu || nu)
            throw Error(ErrorCode::InvalidConfig, "--povm-a and --povm-b go together and exclude --mu/--nu");
        a = read_povm_file(o.povm_a);
        b = read_povm_file(o.povm_b);
        mu = unbiased_bloch_vector(*a);
        nu = unbiased_bloch_vector(*b);
    } else {
        if (!mu || !nu) throw Error(ErrorCode::InvalidConfig, "give --lambda, --mu and --nu, or --povm-a and --povm-b");
        a = bloch_povm(*mu);
        b = bloch_povm(*nu);
    }
    if (mu && nu) {
        const double mn = norm(*mu), nn = norm(*nu);
        unbiased_geometry = mn > 0.0 && std::abs(mn - nn) <= 1e-12 && std::abs(dot(*mu, *nu)) <= 1e-12;
    }

    const Povm conj = o.conjunction.empty() ? sequential_povm(*a, *b) : read_povm_file(o.conjunction);
    const Hovm w = build_hovm(*a, *b, conj);
    const bool hovm_povm = hovm_is_povm(w);

    json verdict;
    verdict["hovm_povm"] = hovm_povm;
    verdict["marginality_defect"] = marginality_defect(w, *a, *b);
    verdict["busch"] = nullptr;
    verdict["boundary_lambda"] = nullptr;
    int status = kExitOk;
    if (mu && nu && a->outcomes() == 2 && a->dim() == 2) {
        const bool busch = busch_compatible(*mu, *nu);
        verdict["busch"] = busch;
        if (o.conjunction.empty() && busch != hovm_povm) {
            err << "compat: Busch criterion and HOVM positivity disagree\n";
            status = kExitStatistical;
        }
        if (unbiased_geometry) verdict["boundary_lambda"] = povm_sharpness_threshold(*mu, *nu);
    }

    if (!o.dump_hovm.empty()) {
        std::ofstream f(o.dump_hovm);
        if (!f) throw Error(ErrorCode::InvalidConfig, "cannot open " + o.dump_hovm);
        f << hovm_to_json(w).dump(2) << '\n';
    }
    Output dest(o.out, out);
    dest.stream() << verdict.dump() << '\n';
    return status;
}

int map_error(const Error& e, std::ostream& err) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
        case ErrorCode::AllTrialsOmitted:
        case ErrorCode::FlatLikelihood:
        case ErrorCode::ZeroSlope:
            return kExitStatistical;
        default:
            return kExitConfig;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Operational-quasiprobability metrology simulator", "oqmetro"};
    app.require_subcommand(1);

    Common fi_opts, adv_opts, est_opts;
    EstimateExtras est_extra;
    CompatOptions compat_opts;

    auto* fi = app.add_subcommand("fi-sweep", "OQFI and QFI over a sharpness grid");
    add_common(fi, fi_opts, false);
    auto* adv = app.add_subcommand("advantage-map", "Advantage over a (theta, phi) grid");
    add_common(adv, adv_opts, false);
    auto* est = app.add_subcommand("estimate", "Monte-Carlo MLE and LEP comparison");
    add_common(est, est_opts, true);
    est->add_option("--segment", est_extra.segment, "Line segment th1,ph1:th2,ph2 in the (theta, phi) plane");
    est->add_option("--points", est_extra.points, "Points along --segment")->capture_default_str();
    est->add_option("--domain", est_extra.domain, "Search interval lo:hi (default 0:pi)");
    est->add_option("--mode", est_extra.mode, "sampled or expected")->capture_default_str();
    auto* compat = app.add_subcommand("compat", "Compatibility certificate for a measurement pair");
    compat->add_option("--lambda", compat_opts.lambda, "Sharpness of the mutually unbiased pair");
    compat->add_option("--mu", compat_opts.mu, "Bloch vector of A as x,y,z");
    compat->add_option("--nu", compat_opts.nu, "Bloch vector of B as x,y,z");
    compat->add_option("--povm-a", compat_opts.povm_a, "JSON file with POVM A");
    compat->add_option("--povm-b", compat_opts.povm_b, "JSON file with POVM B");
    compat->add_option("--conjunction", compat_opts.conjunction, "JSON file with a d*d-outcome conjunction POVM");
    compat->add_option("--dump-hovm", compat_opts.dump_hovm, "Write the HOVM as JSON to this path");
    compat->add_option("--out", compat_opts.out, "Output path (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (*fi) return cmd_fi_sweep(fi_opts, out);
        if (*adv) return cmd_advantage_map(adv_opts, out);
        if (*est) return cmd_estimate(est_opts, est_extra, out, err);
        if (*compat) return cmd_compat(compat_opts, out, err);
    } catch (const Error& e) {
        return map_error(e, err);
    }
    return kExitConfig;
}

}  // namespace oqmetro::cli
