// birkhoff: command-line front end for the birkhoff_lab headers.
//
// Every run produces named outputs. With --out-dir they are written there
// together with manifest.json (parameters, seed, precision, SHA-256 of each
// output); without it a single output goes to stdout.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "function_io.hpp"

#ifndef BIRKHOFF_LAB_VERSION
#define BIRKHOFF_LAB_VERSION "dev"
#endif

namespace {

using namespace birkhoff_lab;
using io::json;

struct Output {
    std::string name;
    std::string content;
};

struct Globals {
    int precision = kDefaultPrecision;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out_dir;
};

struct RunResult {
    std::vector<std::string> path;  // subcommand words
    std::vector<std::string> argv;  // canonical re-run arguments
    json parameters = json::object();
    std::vector<Output> outputs;
    bool help = false;
    std::string help_text;
};

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        fail(ErrorKind::InvariantViolation, "SHA-256 digest failed");
    std::string out;
    char buf[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        out += buf;
    }
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::string& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        fail(ErrorKind::Precondition, "invalid JSON in '" + path + "': " + e.what());
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Comma-separated rows with a fixed header.
class Csv {
public:
    explicit Csv(std::initializer_list<std::string_view> header) { row_of(header); }

    template <class... Cells>
    void row(const Cells&... cells) {
        std::size_t i = 0;
        ((text_ += (i++ ? "," : ""), text_ += cell(cells)), ...);
        text_ += '\n';
    }

    std::string str() const { return text_; }

private:
    void row_of(std::initializer_list<std::string_view> cells) {
        std::size_t i = 0;
        for (auto c : cells) {
            if (i++) text_ += ',';
            text_ += c;
        }
        text_ += '\n';
    }
    static std::string cell(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    static std::string cell(const char* s) { return cell(std::string(s)); }
    static std::string cell(double v) { return num(v); }
    static std::string cell(bool v) { return v ? "true" : "false"; }
    template <class T>
        requires std::is_integral_v<T>
    static std::string cell(T v) {
        return std::to_string(v);
    }

    std::string text_;
};

GrowthGauge parse_gauge(const std::string& text) {
    require(text.rfind("nu=", 0) == 0, "gauge must be given as nu=<exponent>");
    return GrowthGauge::power_law(io::parse_double(json(text.substr(3))));
}

json bigint_json(const BigInt& v) {
    if (v >= 0 && v <= std::numeric_limits<std::uint64_t>::max()) return v.convert_to<std::uint64_t>();
    return v.str();
}

// ---------------------------------------------------------------------------
// Subcommands

Output cmd_cf(const Globals& g, const std::string& alpha_text, std::size_t depth) {
    require(depth >= 1, "depth must be >= 1");
    const auto alpha = parse_alpha(alpha_text, g.precision);
    json out{{"alpha", alpha_text}, {"alpha_hex", alpha.value().hex()}, {"precision", alpha.precision()}};
    out["quotients"] = partial_quotients(alpha, depth);
    json conv = json::array();
    for (const auto& c : convergents(alpha, depth))
        conv.push_back(json{{"k", c.k}, {"p", bigint_json(c.p)}, {"q", bigint_json(c.q)}, {"error", c.error()}});
    out["convergents"] = std::move(conv);
    json tau = json::array();
    if (depth >= 3) {
        auto te = type_exponents(alpha, depth);
        for (std::size_t i = 0; i < te.tau.size(); ++i) tau.push_back(json{{"n", te.index[i]}, {"tau", te.tau[i]}});
        out["tau_liminf_window"] = te.liminf;
    }
    out["tau"] = std::move(tau);
    return {"cf.json", dump(out)};
}

Output cmd_partition(const Globals& g, const std::string& alpha_text, std::size_t level, std::uint64_t budget) {
    const auto alpha = parse_alpha(alpha_text, g.precision);
    auto p = TowerPartition::build(alpha, level, budget);
    Csv csv{"family", "j", "start", "length"};
    for (std::size_t lvl : {level, level + 1}) {
        std::uint64_t j = 0;
        for (const auto& a : p.family_arcs(lvl)) csv.row(lvl, j++, a.start.hex(), to_hex(a.length));
    }
    return {"partition.csv", csv.str()};
}

Output cmd_birkhoff(const Globals& g, const std::string& f_path, const std::string& alpha_text,
                    const std::string& x_hex, std::uint64_t N, std::uint64_t stride, const std::string& gauge_text,
                    std::uint64_t every) {
    require(every >= 1, "--every must be >= 1");
    const auto f = io::function_from_json(read_json(f_path));
    const auto alpha = parse_alpha(alpha_text, g.precision);
    const auto gauge = parse_gauge(gauge_text);
    auto s = birkhoff_series(f, alpha, CirclePoint::from_hex(x_hex), N, stride);
    Csv csv{"n", "S_n", "runmax", "ratio"};
    for (std::uint64_t n = 1; n <= N; ++n)
        if (n % every == 0 || n == N) csv.row(n, s.sums[n], s.running_max[n], std::abs(s.sums[n]) / gauge(n));
    return {"birkhoff.csv", csv.str()};
}

Output cmd_discrepancy(const Globals& g, const std::string& alpha_text, std::uint64_t N, std::uint64_t step) {
    const auto alpha = parse_alpha(alpha_text, g.precision);
    if (step == 0) step = N;
    require(N >= 1, "n must be >= 1");
    Csv csv{"n", "discrepancy", "n_times_discrepancy", "orbit_index", "upper_side"};
    for (std::uint64_t n = step; n <= N; n += step) {
        auto r = discrepancy_star(alpha, n);
        csv.row(n, r.value, static_cast<double>(n) * r.value, r.orbit_index, r.upper_side);
    }
    return {"discrepancy.csv", csv.str()};
}

Output cmd_hilbert(const Globals& g, double a, const std::string& alpha_text, std::uint64_t N, const std::string& mode,
                   std::uint64_t every) {
    require(mode == "direct" || mode == "fourier" || mode == "both", "mode must be direct, fourier or both");
    require(every >= 1, "--every must be >= 1");
    const auto alpha = parse_alpha(alpha_text, g.precision);
    const bool direct = mode != "fourier", fourier = mode != "direct";
    HilbertSeries h;
    std::vector<double> fs;
    if (direct) h = hilbert_partial(HilbertExample(a), alpha.value(), CirclePoint{}, N);
    if (fourier) fs = hilbert_fourier_side(a, alpha.value(), N);
    Csv csv{"N", "direct", "fourier", "difference", "running_sup"};
    for (std::uint64_t n = 1; n <= N; ++n) {
        if (n % every != 0 && n != N) continue;
        const std::string d = direct ? num(h.partial[n]) : "", f = fourier ? num(fs[n]) : "";
        const std::string diff = direct && fourier ? num(h.partial[n] - fs[n]) : "";
        const std::string sup = direct ? num(h.running_sup[n]) : "";
        csv.row(n, d, f, diff, sup);
    }
    return {"hilbert.csv", csv.str()};
}

std::vector<Output> cmd_zoo_plateau(const Globals& g, const std::string& alpha_text, double eps, double C, double nu,
                                    std::size_t level, bool exact_level, const std::string& eta_hex, double s,
                                    double delta, double budget) {
    const auto alpha = parse_alpha(alpha_text, g.precision);
    PlateauOptions opt;
    opt.epsilon = eps;
    opt.C = C;
    opt.gauge = GrowthGauge::power_law(nu);
    opt.s = s;
    opt.delta = delta;
    opt.budget = budget;
    if (!eta_hex.empty()) opt.eta = parse_hex(eta_hex);
    auto b = exact_level ? build_plateau(alpha, level, opt) : build_plateau_auto(alpha, level, opt);
    return {{"function.json", dump(io::descriptor(b.f))}, {"spec.json", dump(io::spec_to_json(b.spec))}};
}

std::vector<Output> cmd_zoo_holder(const Globals& g, const std::string& alpha_text, const HolderOptions& opt) {
    const auto alpha = parse_alpha(alpha_text, g.precision);
    auto b = build_holder(alpha, opt);
    return {{"function.json", dump(io::descriptor(b.f))}, {"spec.json", dump(io::spec_to_json(b.spec))}};
}

std::vector<Output> cmd_zoo_rademacher(const Globals& g, std::uint64_t K, std::uint64_t N, double eps, double budget,
                                       double smooth_delta) {
    auto step = build_rademacher_step(K, N, eps, g.seed, budget);
    json spec = io::spec_to_json(step.spec);
    std::vector<Output> out{{"step.json", dump(io::descriptor(step.g))}};
    if (smooth_delta > 0.0) {
        auto sm = smooth_step(step.g, smooth_delta);
        spec["smoothing"] = json{{"delta", io::hex_double(smooth_delta)},
                                 {"ramp_width", to_hex(sm.ramp_width)},
                                 {"jumps", sm.jumps},
                                 {"bump", sm.bump},
                                 {"bump_width", to_hex(sm.bump_width)},
                                 {"bump_height", io::hex_double(sm.bump_height)},
                                 {"changed_measure", to_hex(sm.changed_measure)}};
        out.push_back({"smooth.json", dump(io::descriptor(sm.f))});
    }
    out.push_back({"spec.json", dump(spec)});
    return out;
}

std::vector<Output> cmd_zoo_noncoboundary(const Globals& g, const std::string& alpha_text,
                                          const NoncoboundaryOptions& opt) {
    const auto alpha = parse_alpha(alpha_text, g.precision);
    auto b = build_noncoboundary(alpha, opt);
    return {{"function.json", dump(io::descriptor(b.f))}, {"spec.json", dump(io::spec_to_json(b.spec))}};
}

TrigPolynomial parse_trig(const std::string& preset, const std::string& coeffs) {
    if (!coeffs.empty()) {
        std::map<std::int64_t, std::complex<double>> out;
        std::stringstream ss(coeffs);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::stringstream is(item);
            std::string k, re, im;
            require(std::getline(is, k, ':') && std::getline(is, re, ':') && std::getline(is, im),
                    "coefficients are k:re:im triples");
            out[std::stoll(k)] = {io::parse_double(json(re)), io::parse_double(json(im))};
        }
        return TrigPolynomial(std::move(out));
    }
    if (preset == "sqrt2cos") return TrigPolynomial::sqrt2_cos();
    if (preset == "sin1") return TrigPolynomial::sin1();
    fail(ErrorKind::Precondition, "unknown trigonometric preset '" + preset + "'");
}

std::vector<Output> cmd_zoo_transfer(const Globals& g, const std::string& alpha_text, const std::string& preset,
                                     const std::string& coeffs) {
    const auto alpha = parse_alpha(alpha_text, g.precision);
    auto r = trig_coboundary_transfer(parse_trig(preset, coeffs), alpha.value());
    json spec{{"kind", "transfer"},
              {"alpha", alpha.value().hex()},
              {"alpha_text", alpha_text},
              {"bound", io::hex_double(r.bound)},
              {"identity_error", io::hex_double(r.identity_error)},
              {"coboundary", io::descriptor(r.g)}};
    return {{"function.json", dump(io::descriptor(r.h))}, {"spec.json", dump(spec)}};
}

std::vector<Output> cmd_zoo_hilbert_example(double a) {
    HilbertExample f(a);
    json spec{{"kind", "hilbert-example"}, {"a", io::hex_double(a)}};
    return {{"function.json", dump(io::descriptor(f))}, {"spec.json", dump(spec)}};
}

std::vector<double> menshov_profile(const std::string& profile, std::uint64_t N, std::uint64_t seed) {
    require(N >= 1, "N must be >= 1");
    std::vector<double> c(N);
    if (profile == "flat") std::fill(c.begin(), c.end(), 1.0);
    else if (profile == "harmonic")
        for (std::uint64_t j = 0; j < N; ++j) c[j] = 1.0 / static_cast<double>(j + 1);
    else if (profile == "random") {
        auto gen = make_stream(seed, ~std::uint64_t{0});
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& v : c) v = u(gen);
    } else fail(ErrorKind::Precondition, "profile must be flat, harmonic or random");
    return c;
}

Output cmd_mc_menshov(const Globals& g, std::uint64_t N, const std::string& profile, std::uint64_t samples) {
    auto c = menshov_profile(profile, N, g.seed);
    auto r = menshov_check(c, samples, g.seed, g.threads);
    Csv csv{"N", "profile", "trials", "estimate", "half_width", "bound", "holds"};
    csv.row(N, profile, samples, r.mean, 3.0 * r.standard_error, r.bound, r.holds);
    return {"menshov.csv", csv.str()};
}

Output cmd_mc_lil(const Globals& g, double eps, std::uint64_t M, std::uint64_t samples) {
    auto h = lil_horizon(eps, M, samples, g.seed, g.threads);
    Csv csv{"stage", "N", "estimate", "half_width", "bound", "confirmed"};
    for (const auto& [N, p] : h.schedule) {
        auto r = MCResult::proportion(static_cast<std::uint64_t>(std::llround(p * static_cast<double>(samples))),
                                      samples, g.seed);
        csv.row("search", N, p, r.half_width, 1.0 - eps, "");
    }
    csv.row("fresh", h.N, h.fresh.estimate, h.fresh.half_width, 1.0 - eps, h.confirmed);
    return {"lil.csv", csv.str()};
}

io::AnyFunction load_or_cosine(const std::string& f_path) {
    if (f_path.empty()) return io::AnyFunction(TrigPolynomial::sqrt2_cos());
    return io::function_from_json(read_json(f_path));
}

Output cmd_mc_ortho(const Globals& g, const std::string& f_path, std::size_t k_max, std::uint64_t samples) {
    const auto f = load_or_cosine(f_path);
    auto r = orthonormality_check(f, k_max, samples, g.seed, g.threads);
    Csv csv{"k", "j", "estimate", "half_width", "bound", "holds"};
    for (std::size_t a = 0; a < k_max; ++a)
        for (std::size_t b = 0; b < k_max; ++b)
            csv.row(a + 1, b + 1, r.gram[a][b], r.tolerance, a == b ? 1.0 : 0.0,
                    std::abs(r.gram[a][b] - (a == b ? 1.0 : 0.0)) < r.tolerance);
    return {"ortho.csv", csv.str()};
}

Output cmd_mc_decay(const Globals& g, const std::string& f_path, double nu, std::size_t k_max, std::uint64_t samples,
                    std::size_t k_fit) {
    const auto f = load_or_cosine(f_path);
    auto t = dyadic_decay(f, nu, k_max, samples, g.seed, k_fit, g.threads);
    Csv csv{"k", "estimate", "half_width", "bound", "dominated", "partial_sum"};
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        csv.row(r.k, r.measure.estimate, r.measure.half_width, r.envelope, r.dominated, t.partial_sums[i]);
    }
    return {"decay.csv", csv.str()};
}

Output cmd_mc_key(const Globals& g, std::uint64_t K, std::uint64_t N, std::uint64_t M, double eps,
                  std::uint64_t samples) {
    auto step = build_rademacher_step(K, N, eps, g.seed);
    auto r = key_lemma_demo(step, M, samples, g.seed, g.threads);
    auto lil = lil_probability(M, N, samples, fresh_seed(g.seed), g.threads);
    const double m = r.ergodic_measure;
    const double combined = 3.0 * std::hypot(r.overall.half_width, m * lil.half_width);
    const double target = m * lil.estimate - combined;
    Csv csv{"group", "samples", "estimate", "half_width", "bound", "holds"};
    csv.row("overall", r.overall.samples, r.overall.estimate, r.overall.half_width, target,
            r.overall.estimate >= target);
    csv.row("ergodic", r.in_ergodic_set.samples, r.in_ergodic_set.estimate, r.in_ergodic_set.half_width, "", "");
    csv.row("outside", r.outside.samples, r.outside.estimate, r.outside.half_width, "", "");
    csv.row("lil_fresh", lil.samples, lil.estimate, lil.half_width, "", "");
    csv.row("ergodic_measure", 0, m, 0.0, "", "");
    return {"key.csv", csv.str()};
}

Output cmd_dim_premeasure(const std::string& cover_path, double s, double delta) {
    const json j = read_json(cover_path);
    std::vector<double> lengths;
    if (j.contains("lengths"))
        for (const auto& l : j["lengths"]) lengths.push_back(io::parse_double(l));
    else
        for (const auto& a : io::field(j, "arcs")) {
            require(a.is_array() && a.size() == 2, "arcs are [start, length] pairs");
            lengths.push_back(fraction_to_double(io::parse_fixed(a[1])));
        }
    Csv csv{"intervals", "s", "delta", "pre_measure"};
    csv.row(lengths.size(), s, delta, pre_measure(lengths, s, delta));
    return {"premeasure.csv", csv.str()};
}

Output cmd_dim_audit(const std::string& spec_path, double s, double delta, double budget) {
    const json j = read_json(spec_path);
    const std::string kind = io::field(j, "kind").get<std::string>();
    CoverAudit audit;
    if (kind == "plateau") audit = construction_cover_audit(io::plateau_spec_from_json(j), s, delta, budget);
    else if (kind == "holder") audit = construction_cover_audit(io::holder_spec_from_json(j), s, delta, budget);
    else fail(ErrorKind::Precondition, "cover audits need a plateau or holder spec, got '" + kind + "'");
    Csv csv{"class", "count", "count_bound", "nominal_length", "pre_measure", "pass"};
    for (const auto& c : audit.classes)
        csv.row(c.name, c.count, c.count_bound, to_hex(c.nominal_length), c.pre_measure, "");
    csv.row("total", "", "", "", audit.pre_measure, audit.pass);
    return {"audit.csv", csv.str()};
}

std::vector<Output> cmd_dim_slowset(const Globals& g, const std::string& f_path, const std::string& alpha_text,
                                    double nu, double B, std::uint64_t M, std::uint64_t N, std::uint64_t grid,
                                    std::size_t j_min, std::size_t j_max) {
    const auto f = io::function_from_json(read_json(f_path));
    const auto alpha = parse_alpha(alpha_text, g.precision);
    auto r = slow_set_sample(f, alpha, GrowthGauge::power_law(nu), B, M, N, grid, g.threads, j_min, j_max);
    Csv cells{"cell", "start", "ratio", "slow"};
    const u128 width = kOne / grid;
    for (std::uint64_t i = 0; i < grid; ++i) cells.row(i, to_hex(width * i), r.ratio[i], r.slow[i] != 0);
    Csv box{"j", "boxes", "dimension", "residual", "undefined"};
    for (std::size_t i = 0; i < r.fit.counts.size(); ++i) box.row(r.fit.j_min + i, r.fit.counts[i], "", "", "");
    box.row("fit", r.slow_count, r.fit.dimension, r.fit.residual, r.fit.undefined);
    return {{"slowset.csv", cells.str()}, {"boxcount.csv", box.str()}};
}

// ---------------------------------------------------------------------------
// Dispatch

/// Records every option of the leaf subcommand, given or defaulted.
void record_parameters(const CLI::App& leaf, RunResult& run) {
    for (const CLI::Option* opt : leaf.get_options()) {
        const std::string name = opt->get_name(false, true);
        if (name == "--help" || name.rfind("--", 0) != 0) continue;
        if (opt->get_items_expected_max() == 0) {
            const bool on = opt->count() > 0;
            run.parameters[name.substr(2)] = on;
            if (on) run.argv.push_back(name);
            continue;
        }
        std::string value = opt->count() > 0 ? opt->results().back() : opt->get_default_str();
        run.parameters[name.substr(2)] = value;
        if (!value.empty()) {
            run.argv.push_back(name);
            run.argv.push_back(value);
        }
    }
}

RunResult run_cli(std::vector<std::string> args, Globals& g);

json manifest_json(const RunResult& run, const Globals& g) {
    json outputs = json::object();
    for (const auto& o : run.outputs) outputs[o.name] = sha256_hex(o.content);
    std::string sub;
    for (const auto& w : run.path) sub += (sub.empty() ? "" : " ") + w;
    return json{{"subcommand", sub},
                {"parameters", run.parameters},
                {"argv", run.argv},
                {"precision", g.precision},
                {"seed", g.seed},
                {"threads", resolve_threads(g.threads)},
                {"version", BIRKHOFF_LAB_VERSION},
                {"outputs", std::move(outputs)}};
}

std::vector<Output> cmd_replay(const std::string& manifest_path, Globals& outer) {
    const json m = read_json(manifest_path);
    std::vector<std::string> args = io::field(m, "argv").get<std::vector<std::string>>();
    args.insert(args.begin(), {"--precision", std::to_string(io::field(m, "precision").get<int>()), "--seed",
                               std::to_string(io::field(m, "seed").get<std::uint64_t>())});
    if (outer.threads > 0) args.insert(args.begin(), {"--threads", std::to_string(outer.threads)});
    Globals inner;
    RunResult run = run_cli(args, inner);
    const json& expected = io::field(m, "outputs");
    json report{{"manifest", manifest_path}, {"match", true}, {"files", json::object()}};
    std::size_t seen = 0;
    for (const auto& o : run.outputs) {
        const std::string digest = sha256_hex(o.content);
        const bool ok = expected.contains(o.name) && expected[o.name] == digest;
        seen += expected.contains(o.name);
        report["files"][o.name] = json{{"expected", expected.value(o.name, "")}, {"actual", digest}, {"match", ok}};
        if (!ok) report["match"] = false;
    }
    if (seen != expected.size()) report["match"] = false;
    if (!report["match"].get<bool>()) {
        std::cout << report.dump(2) << "\n";
        fail(ErrorKind::InvariantViolation, "replayed outputs differ from the manifest digests");
    }
    std::vector<Output> outputs;
    if (!outer.out_dir.empty()) outputs = run.outputs;
    outputs.push_back({"replay.json", dump(report)});
    return outputs;
}

RunResult run_cli(std::vector<std::string> args, Globals& g) {
    CLI::App app{"Birkhoff sums of irrational rotations: constructions, Monte Carlo checks and cover audits",
                 "birkhoff"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", BIRKHOFF_LAB_VERSION);
    app.add_option("--precision", g.precision, "fixed-point bits for alpha (8..127)");
    app.add_option("--seed", g.seed, "Monte Carlo seed");
    app.add_option("--threads", g.threads, "worker threads (default: BIRKHOFF_LAB_THREADS or all cores)");
    app.add_option("--out-dir", g.out_dir, "directory for outputs and manifest.json");

    RunResult run;
    std::function<std::vector<Output>()> action;
    auto single = [](Output o) { return std::vector<Output>{std::move(o)}; };

    // cf
    std::string alpha = "golden";
    std::size_t depth = 10;
    auto* cf = app.add_subcommand("cf", "continued fraction, convergents and type exponents");
    cf->add_option("--alpha", alpha, "golden | sqrt2m1 | quotients:... | decimal:...");
    cf->add_option("--depth", depth, "number of partial quotients");
    cf->callback([&] { action = [&] { return single(cmd_cf(g, alpha, depth)); }; });

    // partition
    std::size_t level = 5;
    std::uint64_t arc_budget = kDefaultArcBudget;
    auto* part = app.add_subcommand("partition", "tower partition arcs at level n");
    part->add_option("--alpha", alpha);
    part->add_option("--level", level);
    part->add_option("--arc-budget", arc_budget);
    part->callback([&] { action = [&] { return single(cmd_partition(g, alpha, level, arc_budget)); }; });

    // birkhoff
    std::string f_path, x_hex = "0", gauge = "nu=0.5";
    std::uint64_t n_terms = 1000, stride = 1, every = 1;
    auto* bk = app.add_subcommand("birkhoff", "Birkhoff sums of a function descriptor");
    bk->add_option("--f", f_path, "function descriptor JSON")->required();
    bk->add_option("--alpha", alpha);
    bk->add_option("--x", x_hex, "start point as a hex fraction of 2^127");
    bk->add_option("--n", n_terms);
    bk->add_option("--stride", stride);
    bk->add_option("--gauge", gauge);
    bk->add_option("--every", every, "emit every k-th row");
    bk->callback([&] {
        action = [&] { return single(cmd_birkhoff(g, f_path, alpha, x_hex, n_terms, stride, gauge, every)); };
    });

    // discrepancy
    std::uint64_t disc_step = 0;
    auto* disc = app.add_subcommand("discrepancy", "star discrepancy of {k alpha}");
    disc->add_option("--alpha", alpha);
    disc->add_option("--n", n_terms);
    disc->add_option("--step", disc_step, "rows at n = step, 2 step, ... (default: only n)");
    disc->callback([&] { action = [&] { return single(cmd_discrepancy(g, alpha, n_terms, disc_step)); }; });

    // hilbert
    double decay_a = 0.5;
    std::string mode = "both";
    auto* hil = app.add_subcommand("hilbert", "one-sided Hilbert partial sums of the analytic example at x = 0");
    hil->add_option("--a", decay_a);
    hil->add_option("--alpha", alpha);
    hil->add_option("--n", n_terms);
    hil->add_option("--mode", mode, "direct | fourier | both");
    hil->add_option("--every", every);
    hil->callback([&] { action = [&] { return single(cmd_hilbert(g, decay_a, alpha, n_terms, mode, every)); }; });

    // zoo
    auto* zoo = app.add_subcommand("zoo", "build example functions");
    zoo->require_subcommand(1);

    double eps = 0.1, C = 1.0, nu = 0.5, s = 0.5, delta = 0.5, budget = 0.5;
    std::string eta_hex;
    bool exact_level = false;
    auto* plateau = zoo->add_subcommand("plateau", "continuous function with S_m f = +-m eps on a large set");
    plateau->add_option("--alpha", alpha);
    plateau->add_option("--eps", eps);
    plateau->add_option("--C", C);
    plateau->add_option("--nu", nu, "gauge psi(n) = n^nu");
    plateau->add_option("--n", level, "level (minimum level unless --exact-level)");
    plateau->add_flag("--exact-level", exact_level);
    plateau->add_option("--eta", eta_hex, "ramp width as a hex fraction (default: from the budget)");
    plateau->add_option("--s", s);
    plateau->add_option("--delta", delta);
    plateau->add_option("--budget", budget);
    plateau->callback([&] {
        action = [&] { return cmd_zoo_plateau(g, alpha, eps, C, nu, level, exact_level, eta_hex, s, delta, budget); };
    });

    HolderOptions hopt;
    double holder_s = 0.0, nu_prime = 0.0;
    bool allow_uncovered = false;
    auto* holder = zoo->add_subcommand("holder", "Holder function with large sums on two families");
    holder->add_option("--alpha", alpha);
    holder->add_option("--xi", hopt.xi);
    holder->add_option("--nu", hopt.nu);
    holder->add_option("--A", hopt.A);
    holder->add_option("--s", holder_s, "cover exponent (0: sqrt(xi/(1-nu)) + 0.05)");
    holder->add_option("--delta", hopt.delta);
    holder->add_option("--budget", hopt.budget);
    holder->add_option("--nu-prime", nu_prime, "0: midpoint of the admissible interval");
    holder->add_option("--n-min", hopt.n_min);
    holder->add_option("--arc-budget", hopt.arc_budget);
    holder->add_flag("--allow-uncovered", allow_uncovered, "fall back to the smallest cover bound");
    holder->callback([&] {
        action = [&] {
            if (holder_s > 0.0) hopt.s = holder_s;
            if (nu_prime > 0.0) hopt.nu_prime = nu_prime;
            hopt.require_cover = !allow_uncovered;
            return cmd_zoo_holder(g, alpha, hopt);
        };
    });

    std::uint64_t K = 4096, N = 32;
    double measure_budget = 1.0, smooth_delta = 0.0;
    auto* rad = zoo->add_subcommand("rademacher", "random +-eps step function on K arcs");
    rad->add_option("--K", K);
    rad->add_option("--N", N);
    rad->add_option("--eps", eps);
    rad->add_option("--budget", measure_budget, "fail when measure(E_O) < 1 - budget");
    rad->add_option("--smooth", smooth_delta, "also emit a continuous version changed on measure <= delta");
    rad->callback([&] { action = [&] { return cmd_zoo_rademacher(g, K, N, eps, measure_budget, smooth_delta); }; });

    NoncoboundaryOptions nopt;
    auto* nonco = zoo->add_subcommand("noncoboundary", "Holder function with growing block sums along alpha");
    nonco->add_option("--alpha", alpha);
    nonco->add_option("--xi", nopt.xi);
    nonco->add_option("--depth", nopt.depth);
    nonco->add_option("--max-index", nopt.max_index);
    nonco->add_flag("--scale-separation", nopt.scale_separation);
    nonco->callback([&] { action = [&] { return cmd_zoo_noncoboundary(g, alpha, nopt); }; });

    std::string preset = "sqrt2cos", coeffs;
    auto* transfer = zoo->add_subcommand("transfer", "solve h = g(. + alpha) - g for a trigonometric polynomial");
    transfer->add_option("--alpha", alpha);
    transfer->add_option("--preset", preset, "sqrt2cos | sin1");
    transfer->add_option("--coeffs", coeffs, "k:re:im,... (overrides --preset)");
    transfer->callback([&] { action = [&] { return cmd_zoo_transfer(g, alpha, preset, coeffs); }; });

    auto* hex_example = zoo->add_subcommand("hilbert-example", "analytic example for the Hilbert transform");
    hex_example->add_option("--a", decay_a);
    hex_example->callback([&] { action = [&] { return cmd_zoo_hilbert_example(decay_a); }; });

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo checks");
    mc->require_subcommand(1);
    std::uint64_t samples = 10000, M = 100;
    std::string profile = "flat";
    std::size_t k_max = 8, k_fit = 6;

    auto* men = mc->add_subcommand("menshov", "maximal inequality for Rademacher sums");
    men->add_option("--N", N);
    men->add_option("--profile", profile, "flat | harmonic | random");
    men->add_option("--samples", samples);
    men->callback([&] { action = [&] { return single(cmd_mc_menshov(g, N, profile, samples)); }; });

    double lil_eps = 0.2;
    auto* lil = mc->add_subcommand("lil", "doubling search for the LIL horizon");
    lil->add_option("--eps", lil_eps);
    lil->add_option("--M", M);
    lil->add_option("--samples", samples);
    lil->callback([&] { action = [&] { return single(cmd_mc_lil(g, lil_eps, M, samples)); }; });

    std::string mc_f;
    auto* ortho = mc->add_subcommand("ortho", "Gram matrix of rotated copies");
    ortho->add_option("--f", mc_f, "function descriptor (default sqrt(2) cos 2 pi x)");
    ortho->add_option("--k-max", k_max);
    ortho->add_option("--samples", samples);
    ortho->callback([&] { action = [&] { return single(cmd_mc_ortho(g, mc_f, k_max, samples)); }; });

    double decay_nu = 0.8;
    auto* decay = mc->add_subcommand("decay", "dyadic-block exceedance measures");
    decay->add_option("--f", mc_f);
    decay->add_option("--nu", decay_nu);
    decay->add_option("--kmax", k_max);
    decay->add_option("--k-fit", k_fit);
    decay->add_option("--samples", samples);
    decay->callback([&] { action = [&] { return single(cmd_mc_decay(g, mc_f, decay_nu, k_max, samples, k_fit)); }; });

    std::uint64_t key_N = 256, key_M = 64;
    double key_eps = 1.0;
    auto* key = mc->add_subcommand("key", "random-step sums against the sqrt(n) threshold");
    key->add_option("--K", K);
    key->add_option("--N", key_N);
    key->add_option("--M", key_M);
    key->add_option("--eps", key_eps);
    key->add_option("--samples", samples);
    key->callback([&] { action = [&] { return single(cmd_mc_key(g, K, key_N, key_M, key_eps, samples)); }; });

    // dim
    auto* dim = app.add_subcommand("dim", "cover pre-measures and slow sets");
    dim->require_subcommand(1);
    std::string cover_path, spec_path;
    double dim_s = 0.5, dim_delta = 1.0, dim_eps = 0.5;
    auto* pre = dim->add_subcommand("premeasure", "sum of |I|^s over a cover");
    pre->add_option("--cover", cover_path)->required();
    pre->add_option("--s", dim_s);
    pre->add_option("--delta", dim_delta);
    pre->callback([&] { action = [&] { return single(cmd_dim_premeasure(cover_path, dim_s, dim_delta)); }; });

    auto* audit = dim->add_subcommand("audit", "class-by-class audit of a construction cover");
    audit->add_option("--spec", spec_path)->required();
    audit->add_option("--s", dim_s);
    audit->add_option("--delta", dim_delta);
    audit->add_option("--eps", dim_eps, "budget for the pre-measure");
    audit->callback([&] { action = [&] { return single(cmd_dim_audit(spec_path, dim_s, dim_delta, dim_eps)); }; });

    double slow_nu = 0.5, B = 1.0;
    std::uint64_t slow_M = 1, slow_N = 1000, grid = 4096;
    std::size_t j_min = 6, j_max = 16;
    auto* slow = dim->add_subcommand("slowset", "cells whose sums stay below B psi(n)");
    slow->add_option("--f", f_path)->required();
    slow->add_option("--alpha", alpha);
    slow->add_option("--nu", slow_nu);
    slow->add_option("--B", B);
    slow->add_option("--M", slow_M);
    slow->add_option("--N", slow_N);
    slow->add_option("--grid", grid);
    slow->add_option("--j-min", j_min);
    slow->add_option("--j-max", j_max);
    slow->callback([&] {
        action = [&] { return cmd_dim_slowset(g, f_path, alpha, slow_nu, B, slow_M, slow_N, grid, j_min, j_max); };
    });

    // replay
    std::string manifest_path;
    auto* replay = app.add_subcommand("replay", "re-run a manifest and compare output digests");
    replay->add_option("--manifest", manifest_path)->required();
    replay->callback([&] { action = [&] { return cmd_replay(manifest_path, g); }; });

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        run.help = true;
        run.help_text = app.help();
        return run;
    } catch (const CLI::CallForAllHelp&) {
        run.help = true;
        run.help_text = app.help("", CLI::AppFormatMode::All);
        return run;
    } catch (const CLI::CallForVersion&) {
        run.help = true;
        run.help_text = std::string(BIRKHOFF_LAB_VERSION) + "\n";
        return run;
    } catch (const CLI::ParseError& e) {
        fail(ErrorKind::Precondition, std::string(e.what()) + "\n" + app.help());
    }
    require(static_cast<bool>(action), "no subcommand given");

    const CLI::App* leaf = &app;
    while (!leaf->get_subcommands().empty()) {
        leaf = leaf->get_subcommands().front();
        run.path.push_back(leaf->get_name());
    }
    run.argv = run.path;
    record_parameters(*leaf, run);
    require(g.precision >= 8 && g.precision <= kFracBits, "precision must be in [8, 127]");
    run.outputs = action();
    return run;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) fail(ErrorKind::Precondition, "cannot write '" + path.string() + "'");
}

int report_error(ErrorKind kind, const std::string& message) {
    const int code = exit_code(kind);
    json err{{"error", std::string(to_string(kind))}, {"message", message}, {"exit_code", code}};
    std::cerr << err.dump() << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        Globals g;
        RunResult run = run_cli(args, g);
        if (run.help) {
            std::cout << run.help_text;
            return 0;
        }
        if (g.out_dir.empty()) {
            require(run.outputs.size() == 1, "this subcommand writes several files; pass --out-dir");
            std::cout << run.outputs.front().content;
            return 0;
        }
        std::filesystem::path dir(g.out_dir);
        std::filesystem::create_directories(dir);
        for (const auto& o : run.outputs) write_file(dir / o.name, o.content);
        if (run.path.front() != "replay") write_file(dir / "manifest.json", dump(manifest_json(run, g)));
        return 0;
    } catch (const Error& e) {
        return report_error(e.kind(), e.what());
    } catch (const json::exception& e) {
        return report_error(ErrorKind::Precondition, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return report_error(ErrorKind::Precondition, e.what());
    } catch (const std::bad_alloc&) {
        return report_error(ErrorKind::BudgetExceeded, "out of memory");
    } catch (const std::exception& e) {
        return report_error(ErrorKind::InvariantViolation, e.what());
    }
}
