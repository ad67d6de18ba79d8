#pragma once

// JSON forms of circle functions and construction specs. Fixed-point values
// are hex strings; doubles are C99 hex-float strings so every value
// round-trips bit-exactly.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "birkhoff_lab.hpp"

namespace birkhoff_lab::io {

using nlohmann::json;

inline std::string hex_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

inline double parse_double(const json& j) {
    if (j.is_number()) return j.get<double>();
    require(j.is_string(), "expected a number or hex-float string");
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    require(end && *end == '\0' && !s.empty(), "invalid floating-point value '" + s + "'");
    return v;
}

inline u128 parse_fixed(const json& j) {
    require(j.is_string(), "fixed-point values must be hex strings");
    return parse_hex(j.get<std::string>());
}

inline const json& field(const json& j, const char* name) {
    require(j.is_object() && j.contains(name), std::string("missing field '") + name + "'");
    return j.at(name);
}

// ---------------------------------------------------------------------------
// Arc sets

inline json arcs_to_json(const ArcSet& set) {
    json out = json::array();
    for (const auto& a : set.arcs()) out.push_back(json::array({a.start.hex(), to_hex(a.length)}));
    return out;
}

inline ArcSet arcs_from_json(const json& j) {
    require(j.is_array(), "arc list must be an array");
    std::vector<Arc> arcs;
    arcs.reserve(j.size());
    for (const auto& a : j) {
        require(a.is_array() && a.size() == 2, "arcs are [start, length] pairs");
        arcs.push_back(Arc::make(CirclePoint::from_raw(parse_fixed(a[0])), parse_fixed(a[1])));
    }
    return ArcSet::from_arcs(arcs);
}

// ---------------------------------------------------------------------------
// Function descriptors

/// A loaded descriptor: piecewise pieces or one of the analytic examples.
class AnyFunction {
public:
    using Variant = std::variant<PiecewiseFn, HilbertExample, TrigPolynomial>;

    explicit AnyFunction(Variant v) : fn_(std::move(v)) {}

    double operator()(CirclePoint x) const {
        return std::visit([x](const auto& f) { return static_cast<double>(f(x)); }, fn_);
    }

    const PiecewiseFn* piecewise() const { return std::get_if<PiecewiseFn>(&fn_); }

private:
    Variant fn_;
};

inline std::string_view segment_kind_name(SegmentKind k) {
    switch (k) {
        case SegmentKind::Constant: return "const";
        case SegmentKind::Affine: return "affine";
        case SegmentKind::PowerCusp: return "cusp";
    }
    return "const";
}

inline json descriptor(const PiecewiseFn& f, Continuity continuity = Continuity::Require) {
    json segs = json::array();
    for (const auto& s : f.segments()) {
        json j{{"kind", segment_kind_name(s.kind)}, {"start", s.start.hex()}, {"length", to_hex(s.length)}};
        switch (s.kind) {
            case SegmentKind::Constant: j["value"] = hex_double(s.left); break;
            case SegmentKind::Affine:
                j["left"] = hex_double(s.left);
                j["right"] = hex_double(s.right);
                break;
            case SegmentKind::PowerCusp:
                j["scale"] = hex_double(s.scale);
                j["exponent"] = hex_double(s.exponent);
                j["side"] = s.side;
                break;
        }
        segs.push_back(std::move(j));
    }
    json bps = json::array();
    for (auto p : f.breakpoints()) bps.push_back(p.hex());
    return json{{"kind", "piecewise"},
                {"continuity", continuity == Continuity::Require ? "require" : "allow"},
                {"segments", std::move(segs)},
                {"breakpoints", std::move(bps)}};
}

inline json descriptor(const StepFunction& g) {
    std::vector<Segment> segs;
    for (const auto& p : g.pieces())
        segs.push_back(Segment::constant(CirclePoint::from_raw(p.lo), p.hi - p.lo, p.value));
    return descriptor(PiecewiseFn(std::move(segs), Continuity::Allow), Continuity::Allow);
}

inline json descriptor(const HilbertExample& f) { return json{{"kind", "hilbert-example"}, {"a", hex_double(f.a())}}; }

inline json descriptor(const TrigPolynomial& h) {
    json coeffs = json::array();
    for (const auto& [k, c] : h.coefficients())
        coeffs.push_back(json{{"k", k}, {"re", hex_double(c.real())}, {"im", hex_double(c.imag())}});
    return json{{"kind", "trig"}, {"mean", hex_double(h.mean())}, {"coefficients", std::move(coeffs)}};
}

inline TrigPolynomial trig_from_json(const json& j) {
    std::map<std::int64_t, std::complex<double>> coeffs;
    for (const auto& c : field(j, "coefficients"))
        coeffs[field(c, "k").get<std::int64_t>()] = {parse_double(field(c, "re")), parse_double(field(c, "im"))};
    return TrigPolynomial(std::move(coeffs), j.contains("mean") ? parse_double(j["mean"]) : 0.0);
}

inline PiecewiseFn piecewise_from_json(const json& j) {
    std::vector<Segment> segs;
    for (const auto& s : field(j, "segments")) {
        const std::string kind = field(s, "kind").get<std::string>();
        const CirclePoint start = CirclePoint::from_raw(parse_fixed(field(s, "start")));
        const u128 length = parse_fixed(field(s, "length"));
        if (kind == "const") segs.push_back(Segment::constant(start, length, parse_double(field(s, "value"))));
        else if (kind == "affine")
            segs.push_back(Segment::affine(start, length, parse_double(field(s, "left")), parse_double(field(s, "right"))));
        else if (kind == "cusp")
            segs.push_back(Segment::cusp(start, length, parse_double(field(s, "scale")), parse_double(field(s, "exponent")),
                                         field(s, "side").get<int>()));
        else fail(ErrorKind::Precondition, "unknown segment kind '" + kind + "'");
    }
    const bool allow = j.value("continuity", std::string("require")) == "allow";
    PiecewiseFn f(std::move(segs), allow ? Continuity::Allow : Continuity::Require);
    if (j.contains("breakpoints")) {
        std::vector<CirclePoint> stored;
        for (const auto& b : j["breakpoints"]) stored.push_back(CirclePoint::from_raw(parse_fixed(b)));
        require(stored == f.breakpoints(), "descriptor breakpoints do not match its segments");
    }
    return f;
}

inline AnyFunction function_from_json(const json& j) {
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind == "piecewise") return AnyFunction(piecewise_from_json(j));
    if (kind == "hilbert-example") return AnyFunction(HilbertExample(parse_double(field(j, "a"))));
    if (kind == "trig") return AnyFunction(trig_from_json(j));
    fail(ErrorKind::Precondition, "unknown function kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Construction specs

inline json spec_to_json(const PlateauSpec& s) {
    return json{{"kind", "plateau"},
                {"alpha", s.alpha.hex()},
                {"alpha_text", s.alpha_text},
                {"precision", s.precision},
                {"level", s.level},
                {"epsilon", hex_double(s.epsilon)},
                {"C", hex_double(s.C)},
                {"gauge", s.gauge},
                {"m", s.m},
                {"eta", to_hex(s.eta)},
                {"q_n", s.q_n},
                {"q_next", s.q_next},
                {"even_n", s.even_n},
                {"even_next", s.even_next},
                {"d_n", to_hex(s.d_n)},
                {"d_next", to_hex(s.d_next)},
                {"s", hex_double(s.s)},
                {"delta", hex_double(s.delta)},
                {"budget", hex_double(s.budget)},
                {"cover_bound", hex_double(s.cover_bound)},
                {"good_set", arcs_to_json(s.good_set)}};
}

inline PlateauSpec plateau_spec_from_json(const json& j) {
    PlateauSpec s;
    s.alpha = CirclePoint::from_raw(parse_fixed(field(j, "alpha")));
    s.alpha_text = field(j, "alpha_text").get<std::string>();
    s.precision = field(j, "precision").get<int>();
    s.level = field(j, "level").get<std::size_t>();
    s.epsilon = parse_double(field(j, "epsilon"));
    s.C = parse_double(field(j, "C"));
    s.gauge = field(j, "gauge").get<std::string>();
    s.m = field(j, "m").get<std::uint64_t>();
    s.eta = parse_fixed(field(j, "eta"));
    s.q_n = field(j, "q_n").get<std::uint64_t>();
    s.q_next = field(j, "q_next").get<std::uint64_t>();
    s.even_n = field(j, "even_n").get<std::uint64_t>();
    s.even_next = field(j, "even_next").get<std::uint64_t>();
    s.d_n = parse_fixed(field(j, "d_n"));
    s.d_next = parse_fixed(field(j, "d_next"));
    s.s = parse_double(field(j, "s"));
    s.delta = parse_double(field(j, "delta"));
    s.budget = parse_double(field(j, "budget"));
    s.cover_bound = parse_double(field(j, "cover_bound"));
    s.good_set = arcs_from_json(field(j, "good_set"));
    return s;
}

inline json spec_to_json(const HolderSpec& s) {
    return json{{"kind", "holder"},
                {"alpha", s.alpha.hex()},
                {"alpha_text", s.alpha_text},
                {"precision", s.precision},
                {"xi", hex_double(s.xi)},
                {"nu", hex_double(s.nu)},
                {"nu_prime", hex_double(s.nu_prime)},
                {"A", hex_double(s.A)},
                {"s", hex_double(s.s)},
                {"delta", hex_double(s.delta)},
                {"budget", hex_double(s.budget)},
                {"case", to_string(s.case_tag)},
                {"tau", hex_double(s.tau)},
                {"tau_n", hex_double(s.tau_n)},
                {"level", s.level},
                {"delta0", hex_double(s.delta0)},
                {"gamma0", hex_double(s.gamma0)},
                {"delta1", hex_double(s.delta1)},
                {"gamma1", hex_double(s.gamma1)},
                {"m0", s.m0},
                {"m1", s.m1},
                {"trim0", to_hex(s.trim0)},
                {"trim1", to_hex(s.trim1)},
                {"amplitude", hex_double(s.amplitude)},
                {"lip", hex_double(s.lip)},
                {"q_n", s.q_n},
                {"q_next", s.q_next},
                {"even_n", s.even_n},
                {"even_next", s.even_next},
                {"d_n", to_hex(s.d_n)},
                {"d_next", to_hex(s.d_next)},
                {"cover_bound", hex_double(s.cover_bound)},
                {"cover_ok", s.cover_ok},
                {"good0", arcs_to_json(s.good0)},
                {"good1", arcs_to_json(s.good1)}};
}

inline HolderSpec holder_spec_from_json(const json& j) {
    HolderSpec s;
    s.alpha = CirclePoint::from_raw(parse_fixed(field(j, "alpha")));
    s.alpha_text = field(j, "alpha_text").get<std::string>();
    s.precision = field(j, "precision").get<int>();
    s.xi = parse_double(field(j, "xi"));
    s.nu = parse_double(field(j, "nu"));
    s.nu_prime = parse_double(field(j, "nu_prime"));
    s.A = parse_double(field(j, "A"));
    s.s = parse_double(field(j, "s"));
    s.delta = parse_double(field(j, "delta"));
    s.budget = parse_double(field(j, "budget"));
    const std::string c = field(j, "case").get<std::string>();
    require(c == "one" || c == "two", "case must be 'one' or 'two'");
    s.case_tag = c == "one" ? HolderCase::One : HolderCase::Two;
    s.tau = parse_double(field(j, "tau"));
    s.tau_n = parse_double(field(j, "tau_n"));
    s.level = field(j, "level").get<std::size_t>();
    s.delta0 = parse_double(field(j, "delta0"));
    s.gamma0 = parse_double(field(j, "gamma0"));
    s.delta1 = parse_double(field(j, "delta1"));
    s.gamma1 = parse_double(field(j, "gamma1"));
    s.m0 = field(j, "m0").get<std::uint64_t>();
    s.m1 = field(j, "m1").get<std::uint64_t>();
    s.trim0 = parse_fixed(field(j, "trim0"));
    s.trim1 = parse_fixed(field(j, "trim1"));
    s.amplitude = parse_double(field(j, "amplitude"));
    s.lip = parse_double(field(j, "lip"));
    s.q_n = field(j, "q_n").get<std::uint64_t>();
    s.q_next = field(j, "q_next").get<std::uint64_t>();
    s.even_n = field(j, "even_n").get<std::uint64_t>();
    s.even_next = field(j, "even_next").get<std::uint64_t>();
    s.d_n = parse_fixed(field(j, "d_n"));
    s.d_next = parse_fixed(field(j, "d_next"));
    s.cover_bound = parse_double(field(j, "cover_bound"));
    s.cover_ok = field(j, "cover_ok").get<bool>();
    s.good0 = arcs_from_json(field(j, "good0"));
    s.good1 = arcs_from_json(field(j, "good1"));
    return s;
}

inline json spec_to_json(const NoncoboundarySpec& s) {
    json stages = json::array();
    for (const auto& st : s.stages)
        stages.push_back(json{{"k", st.k},
                              {"n_start", st.n_start},
                              {"n_end", st.n_end},
                              {"h", to_hex(st.h)},
                              {"height", hex_double(st.height)},
                              {"count", st.indices.size()},
                              {"measure", to_hex(st.measure)},
                              {"measure_bound", hex_double(st.measure_bound)},
                              {"mass", hex_double(st.mass)},
                              {"disjoint", st.disjoint},
                              {"measure_ok", st.measure_ok},
                              {"mass_ok", st.mass_ok},
                              {"separation_ok", st.separation_ok}});
    return json{{"kind", "noncoboundary"},
                {"alpha", s.alpha.hex()},
                {"alpha_text", s.alpha_text},
                {"precision", s.precision},
                {"xi", hex_double(s.xi)},
                {"scale_separation", s.scale_separation},
                {"breakpoints", s.breakpoints()},
                {"stages", std::move(stages)}};
}

inline json spec_to_json(const RademacherStepSpec& s) {
    json bounds = json::array();
    for (u128 b : s.boundaries) bounds.push_back(to_hex(b));
    return json{{"kind", "rademacher"},
                {"K", s.K},
                {"N", s.N},
                {"epsilon", hex_double(s.epsilon)},
                {"seed", s.seed},
                {"signs", s.signs},
                {"boundaries", std::move(bounds)},
                {"ergodic_measure", to_hex(s.ergodic_set.measure())},
                {"measure_lower_bound", hex_double(s.measure_lower_bound)},
                {"ergodic_set", arcs_to_json(s.ergodic_set)}};
}

} // namespace birkhoff_lab::io
