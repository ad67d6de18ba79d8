#pragma once

// Monte Carlo checks of the probabilistic ingredients: the Menshov-Rademacher
// maximal inequality, a law-of-the-iterated-logarithm horizon, orthonormality
// of rotated copies, dyadic-block decay, and the random-step key lemma.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "birkhoff_lab/birkhoff.hpp"
#include "birkhoff_lab/error.hpp"
#include "birkhoff_lab/fixed_point.hpp"
#include "birkhoff_lab/parallel.hpp"
#include "birkhoff_lab/rng.hpp"
#include "birkhoff_lab/zoo_rademacher.hpp"

namespace birkhoff_lab {

/// Proportion estimate with a 95% normal-approximation half-width.
struct MCResult {
    double estimate = 0.0;
    std::uint64_t samples = 0;
    double half_width = 0.0;
    std::uint64_t seed = 0;

    static MCResult proportion(std::uint64_t hits, std::uint64_t samples, std::uint64_t seed) {
        MCResult r;
        r.samples = samples;
        r.seed = seed;
        if (samples == 0) return r;
        r.estimate = static_cast<double>(hits) / static_cast<double>(samples);
        r.half_width = 1.96 * std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(samples));
        return r;
    }
};

inline std::uint64_t chunk_count(std::uint64_t samples) { return (samples + kSamplesPerChunk - 1) / kSamplesPerChunk; }

// ---------------------------------------------------------------------------
// Menshov-Rademacher

struct MenshovResult {
    std::uint64_t N = 0;
    std::uint64_t trials = 0;
    double mean = 0.0;            // empirical E[max_n (sum_{j<=n} c_j X_j)^2]
    double standard_error = 0.0;
    double bound = 0.0;           // log2(4N)^2 sum c^2
    bool holds = false;           // mean - 3 SE <= bound
};

inline MenshovResult menshov_check(std::span<const double> coeffs, std::uint64_t trials, std::uint64_t seed,
                                   unsigned threads = 0) {
    require(!coeffs.empty(), "need at least one coefficient");
    require(trials >= 2, "need at least two trials");
    const std::uint64_t chunks = chunk_count(trials);
    std::vector<std::pair<double, double>> partial(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        auto gen = make_stream(seed, c);
        const std::uint64_t lo = c * kSamplesPerChunk, hi = std::min(trials, lo + kSamplesPerChunk);
        double s1 = 0.0, s2 = 0.0;
        for (std::uint64_t t = lo; t < hi; ++t) {
            double sum = 0.0, best = 0.0;
            for (double cj : coeffs) {
                sum += cj * rademacher(gen);
                best = std::max(best, sum * sum);
            }
            s1 += best;
            s2 += best * best;
        }
        partial[c] = {s1, s2};
    });
    double s1 = 0.0, s2 = 0.0;
    for (const auto& [a, b] : partial) {
        s1 += a;
        s2 += b;
    }
    MenshovResult r;
    r.N = coeffs.size();
    r.trials = trials;
    const double n = static_cast<double>(trials);
    r.mean = s1 / n;
    const double var = std::max(0.0, (s2 - n * r.mean * r.mean) / (n - 1.0));
    r.standard_error = std::sqrt(var / n);
    double sq = 0.0;
    for (double cj : coeffs) sq += cj * cj;
    const double lg = std::log2(4.0 * static_cast<double>(r.N));
    r.bound = lg * lg * sq;
    r.holds = r.mean - 3.0 * r.standard_error <= r.bound;
    return r;
}

// ---------------------------------------------------------------------------
// Law of the iterated logarithm

inline constexpr std::uint64_t kHorizonBudget = std::uint64_t{1} << 40;

namespace detail {

/// One +-1 walk, advanced lazily and recording the first n >= M with
/// |S_n| > (1/2) sqrt(n ln ln n).
class LilWalk {
public:
    LilWalk(std::uint64_t seed, std::uint64_t trial, std::uint64_t M) : gen_(make_stream(seed, trial)), M_(M) {}

    void advance_to(std::uint64_t N) {
        while (!hit_ && n_ < N) {
            if (bits_left_ == 0) {
                word_ = gen_();
                bits_left_ = 64;
            }
            sum_ += (word_ & 1) ? 1 : -1;
            word_ >>= 1;
            --bits_left_;
            ++n_;
            if (n_ >= M_) {
                const double nd = static_cast<double>(n_);
                const double s = static_cast<double>(sum_);
                if (4.0 * s * s > nd * std::log(std::log(nd))) {
                    hit_ = true;
                    first_ = n_;
                }
            }
        }
    }

    bool hit() const { return hit_; }
    std::uint64_t first() const { return first_; }

private:
    std::mt19937_64 gen_;
    std::uint64_t M_;
    std::uint64_t n_ = 0, first_ = 0, word_ = 0;
    std::int64_t sum_ = 0;
    int bits_left_ = 0;
    bool hit_ = false;
};

} // namespace detail

/// P(sup_{M<=n<=N} |S_n| / sqrt(n ln ln n) > 1/2) for a +-1 walk.
inline MCResult lil_probability(std::uint64_t M, std::uint64_t N, std::uint64_t trials, std::uint64_t seed,
                                unsigned threads = 0) {
    require(M >= 16, "need M >= 16");
    require(N >= M, "need N >= M");
    require(trials >= 1, "need at least one trial");
    if (N > kHorizonBudget) fail(ErrorKind::HorizonBudget, "horizon exceeds 2^40");
    std::vector<std::uint8_t> hit(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        detail::LilWalk w(seed, t, M);
        w.advance_to(N);
        hit[t] = w.hit();
    });
    std::uint64_t hits = 0;
    for (auto h : hit) hits += h;
    return MCResult::proportion(hits, trials, seed);
}

struct LilHorizon {
    double epsilon = 0.0;
    std::uint64_t M = 0;
    std::uint64_t N = 0;
    MCResult found;                         // probability at N on the search seed
    MCResult fresh;                         // re-simulation on an independent seed
    std::vector<std::pair<std::uint64_t, double>> schedule;  // (N, probability) along the doubling
    bool confirmed = false;                 // fresh estimate > 1 - eps - 2 half-widths
};

inline std::uint64_t fresh_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ull; }

/// Doubling search N = M, 2M, 4M, ... for the first N whose empirical
/// probability exceeds 1 - eps by at least one half-width.
inline LilHorizon lil_horizon(double epsilon, std::uint64_t M, std::uint64_t trials, std::uint64_t seed,
                              unsigned threads = 0) {
    require(epsilon > 0.0 && epsilon < 1.0, "eps must be in (0, 1)");
    require(M >= 16, "need M >= 16");
    require(trials >= 1, "need at least one trial");
    std::vector<detail::LilWalk> walks;
    walks.reserve(trials);
    for (std::uint64_t t = 0; t < trials; ++t) walks.emplace_back(seed, t, M);
    LilHorizon out;
    out.epsilon = epsilon;
    out.M = M;
    for (std::uint64_t N = M;; N *= 2) {
        if (N > kHorizonBudget) fail(ErrorKind::HorizonBudget, "no horizon below 2^40 reaches 1 - eps");
        parallel_for(trials, threads, [&](std::size_t t) { walks[t].advance_to(N); });
        std::uint64_t hits = 0;
        for (const auto& w : walks) hits += w.hit();
        MCResult r = MCResult::proportion(hits, trials, seed);
        out.schedule.push_back({N, r.estimate});
        if (r.estimate - r.half_width > 1.0 - epsilon) {
            out.N = N;
            out.found = r;
            break;
        }
    }
    out.fresh = lil_probability(M, out.N, trials, fresh_seed(seed), threads);
    out.confirmed = out.fresh.estimate > 1.0 - epsilon - 2.0 * out.fresh.half_width;
    return out;
}

// ---------------------------------------------------------------------------
// Orthonormality of X_k(u, x) = f(x + k u)

struct OrthonormalityResult {
    std::size_t k_max = 0;
    std::uint64_t samples = 0;
    std::vector<std::vector<double>> gram;  // k, j = 1..k_max (stored 0-based)
    double max_deviation = 0.0;
    double tolerance = 0.0;                 // 3 / sqrt(samples)
    bool holds = false;
};

/// Midpoint-rule mean and L^2 norm squared of f over 2^16 cells.
template <CircleFunction F>
std::pair<double, double> quadrature_moments(const F& f, std::uint64_t cells = 1u << 16) {
    detail::CompensatedSum m, m2;
    const u128 step = kOne / cells;
    for (std::uint64_t i = 0; i < cells; ++i) {
        double v = f(CirclePoint::from_raw(step * i + step / 2));
        m.add(v);
        m2.add(static_cast<long double>(v) * v);
    }
    return {static_cast<double>(m.value() / cells), static_cast<double>(m2.value() / cells)};
}

template <CircleFunction F>
OrthonormalityResult orthonormality_check(const F& f, std::size_t k_max, std::uint64_t samples, std::uint64_t seed,
                                          unsigned threads = 0) {
    require(k_max >= 1 && k_max <= 64, "k_max must be in [1, 64]");
    require(samples >= 1, "need at least one sample");
    auto [mean, norm2] = quadrature_moments(f);
    require(std::abs(mean) < 1e-6, "f must have zero mean");
    require(std::abs(norm2 - 1.0) < 1e-6, "f must have unit L^2 norm");
    const std::uint64_t chunks = chunk_count(samples);
    const std::size_t K = k_max;
    std::vector<std::vector<double>> partial(chunks, std::vector<double>(K * K, 0.0));
    parallel_for(chunks, threads, [&](std::size_t c) {
        auto gen = make_stream(seed, c);
        const std::uint64_t lo = c * kSamplesPerChunk, hi = std::min(samples, lo + kSamplesPerChunk);
        std::vector<double> x(K);
        auto& acc = partial[c];
        for (std::uint64_t t = lo; t < hi; ++t) {
            const CirclePoint u = uniform_point(gen);
            CirclePoint p = uniform_point(gen);
            for (std::size_t k = 0; k < K; ++k) {
                p += u;
                x[k] = f(p);
            }
            for (std::size_t a = 0; a < K; ++a)
                for (std::size_t b = a; b < K; ++b) acc[a * K + b] += x[a] * x[b];
        }
    });
    OrthonormalityResult r;
    r.k_max = K;
    r.samples = samples;
    r.tolerance = 3.0 / std::sqrt(static_cast<double>(samples));
    r.gram.assign(K, std::vector<double>(K, 0.0));
    for (std::size_t a = 0; a < K; ++a)
        for (std::size_t b = a; b < K; ++b) {
            double s = 0.0;
            for (const auto& p : partial) s += p[a * K + b];
            const double v = s / static_cast<double>(samples);
            r.gram[a][b] = r.gram[b][a] = v;
            r.max_deviation = std::max(r.max_deviation, std::abs(v - (a == b ? 1.0 : 0.0)));
        }
    r.holds = r.max_deviation < r.tolerance;
    return r;
}

// ---------------------------------------------------------------------------
// Dyadic-block decay

struct DyadicRow {
    std::size_t k = 0;
    MCResult measure;       // empirical mu x mu(E_k)
    double envelope = 0.0;  // C k^2 2^{k(1-2 nu)}
    bool dominated = false; // estimate <= envelope + half-width
};

struct DyadicDecayTable {
    double nu = 0.0;
    std::size_t k_fit = 0;
    double fitted_constant = 0.0;
    std::vector<DyadicRow> rows;  // k = 0..k_max
    std::vector<double> partial_sums;
};

/// E_k = {(u, x) : |S_{n,u} f(x)| >= n^nu for some n in [2^k, 2^{k+1})}, all k
/// from one orbit sweep per sample.
template <CircleFunction F>
DyadicDecayTable dyadic_decay(const F& f, double nu, std::size_t k_max, std::uint64_t samples, std::uint64_t seed,
                              std::size_t k_fit = 6, unsigned threads = 0) {
    require(nu > 0.5 && nu < 1.0, "nu must be in (1/2, 1)");
    require(k_max <= 20, "k_max must be <= 20");
    require(k_fit <= k_max, "fit row must be within the table");
    require(samples >= 1, "need at least one sample");
    const std::uint64_t horizon = (std::uint64_t{2} << k_max) - 1;
    if (static_cast<long double>(horizon) * samples > 1e12L)
        fail(ErrorKind::BudgetExceeded, "dyadic sweep exceeds 10^12 evaluations");
    std::vector<double> thresholds(horizon + 1);
    for (std::uint64_t n = 1; n <= horizon; ++n) thresholds[n] = std::pow(static_cast<double>(n), nu);

    const std::uint64_t chunks = chunk_count(samples);
    std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(k_max + 1, 0));
    parallel_for(chunks, threads, [&](std::size_t c) {
        auto gen = make_stream(seed, c);
        const std::uint64_t lo = c * kSamplesPerChunk, hi = std::min(samples, lo + kSamplesPerChunk);
        auto& hits = partial[c];
        for (std::uint64_t t = lo; t < hi; ++t) {
            const CirclePoint u = uniform_point(gen);
            CirclePoint p = uniform_point(gen);
            double sum = 0.0;
            std::size_t k = 0;
            std::uint64_t block_end = 2;
            bool in_block = false;
            for (std::uint64_t n = 1; n <= horizon; ++n) {
                if (n == block_end) {
                    ++k;
                    block_end *= 2;
                    in_block = false;
                }
                sum += f(p);
                p += u;
                if (!in_block && std::abs(sum) >= thresholds[n]) {
                    in_block = true;
                    ++hits[k];
                }
            }
        }
    });
    DyadicDecayTable table;
    table.nu = nu;
    table.k_fit = k_fit;
    for (std::size_t k = 0; k <= k_max; ++k) {
        std::uint64_t hits = 0;
        for (const auto& p : partial) hits += p[k];
        DyadicRow row;
        row.k = k;
        row.measure = MCResult::proportion(hits, samples, seed);
        table.rows.push_back(row);
    }
    auto shape = [nu](std::size_t k) {
        const double kd = static_cast<double>(k);
        return kd * kd * std::exp2(kd * (1.0 - 2.0 * nu));
    };
    table.fitted_constant = k_fit == 0 ? 0.0 : table.rows[k_fit].measure.estimate / shape(k_fit);
    double running = 0.0;
    for (auto& row : table.rows) {
        row.envelope = table.fitted_constant * shape(row.k);
        row.dominated = row.measure.estimate <= row.envelope + row.measure.half_width;
        running += row.measure.estimate;
        table.partial_sums.push_back(running);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Key lemma

struct KeyLemmaResult {
    double threshold = 0.0;   // (eps/2) sqrt(ln ln M)
    double ergodic_measure = 0.0;
    MCResult overall;
    MCResult in_ergodic_set;  // u in E_O
    MCResult outside;         // u not in E_O: control group, no guarantee
};

/// Fraction of (u, x) with sup_{M<=n<=N} |S_{n,u} g(x)| / sqrt(n) above the threshold.
inline KeyLemmaResult key_lemma_demo(const RademacherStep& step, std::uint64_t M, std::uint64_t samples,
                                     std::uint64_t seed, unsigned threads = 0) {
    const auto& spec = step.spec;
    require(M >= 16, "need M >= 16");
    require(spec.N >= M, "horizon N must be >= M");
    require(samples >= 1, "need at least one sample");
    KeyLemmaResult r;
    r.threshold = 0.5 * spec.epsilon * std::sqrt(std::log(std::log(static_cast<double>(M))));
    r.ergodic_measure = spec.ergodic_set.measure_double();
    const std::uint64_t chunks = chunk_count(samples);
    struct Counts {
        std::uint64_t hit_in = 0, n_in = 0, hit_out = 0, n_out = 0;
    };
    std::vector<Counts> partial(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        auto gen = make_stream(seed, c);
        const std::uint64_t lo = c * kSamplesPerChunk, hi = std::min(samples, lo + kSamplesPerChunk);
        Counts& cnt = partial[c];
        for (std::uint64_t t = lo; t < hi; ++t) {
            const CirclePoint u = uniform_point(gen);
            CirclePoint p = uniform_point(gen);
            double sum = 0.0;
            bool hit = false;
            for (std::uint64_t n = 1; n <= spec.N; ++n) {
                sum += step.g(p);
                p += u;
                if (n >= M && std::abs(sum) > r.threshold * std::sqrt(static_cast<double>(n))) {
                    hit = true;
                    break;
                }
            }
            if (spec.ergodic_set.contains(u)) {
                ++cnt.n_in;
                cnt.hit_in += hit;
            } else {
                ++cnt.n_out;
                cnt.hit_out += hit;
            }
        }
    });
    Counts total;
    for (const auto& c : partial) {
        total.hit_in += c.hit_in;
        total.n_in += c.n_in;
        total.hit_out += c.hit_out;
        total.n_out += c.n_out;
    }
    r.overall = MCResult::proportion(total.hit_in + total.hit_out, samples, seed);
    r.in_ergodic_set = MCResult::proportion(total.hit_in, total.n_in, seed);
    r.outside = MCResult::proportion(total.hit_out, total.n_out, seed);
    return r;
}

} // namespace birkhoff_lab
