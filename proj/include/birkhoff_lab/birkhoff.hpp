#pragma once

// Birkhoff sums along rotation orbits and their diagnostics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "birkhoff_lab/cf_arith.hpp"
#include "birkhoff_lab/error.hpp"
#include "birkhoff_lab/fixed_point.hpp"
#include "birkhoff_lab/gauge.hpp"
#include "birkhoff_lab/piecewise.hpp"

namespace birkhoff_lab {

template <class F>
concept CircleFunction = requires(const F& f, CirclePoint x) {
    { f(x) } -> std::convertible_to<double>;
};

inline constexpr std::uint64_t kSeriesBudget = 100'000'000;

struct BirkhoffSeries {
    CirclePoint x;
    CirclePoint alpha;
    std::uint64_t stride = 1;
    std::vector<double> sums;         // S_0 .. S_N
    std::vector<double> running_max;  // max_{m <= n} |S_m|

    std::uint64_t length() const { return sums.empty() ? 0 : sums.size() - 1; }
};

/// S_0..S_N of f along x + k*stride*alpha, compensated.
template <CircleFunction F>
BirkhoffSeries birkhoff_series(const F& f, const RotationNumber& alpha, CirclePoint x, std::uint64_t N,
                               std::uint64_t stride = 1, std::uint64_t budget = kSeriesBudget) {
    require(N >= 1, "series length must be >= 1");
    require(stride >= 1, "stride must be >= 1");
    if (N > budget) fail(ErrorKind::BudgetExceeded, "series length " + std::to_string(N) + " exceeds budget");
    BirkhoffSeries s;
    s.x = x;
    s.alpha = alpha.value();
    s.stride = stride;
    s.sums.resize(N + 1);
    s.running_max.resize(N + 1);
    const CirclePoint step = alpha.value().times(stride);
    detail::CompensatedSum acc;
    CirclePoint p = x;
    double runmax = 0.0;
    s.sums[0] = 0.0;
    s.running_max[0] = 0.0;
    for (std::uint64_t n = 1; n <= N; ++n) {
        acc.add(f(p));
        p += step;
        double v = static_cast<double>(acc.value());
        runmax = std::max(runmax, std::abs(v));
        s.sums[n] = v;
        s.running_max[n] = runmax;
    }
    return s;
}

/// Single value S_n f(x).
template <CircleFunction F>
double birkhoff_sum(const F& f, CirclePoint alpha, CirclePoint x, std::uint64_t n, std::uint64_t stride = 1) {
    const CirclePoint step = alpha.times(stride);
    detail::CompensatedSum acc;
    CirclePoint p = x;
    for (std::uint64_t k = 0; k < n; ++k) {
        acc.add(f(p));
        p += step;
    }
    return static_cast<double>(acc.value());
}

struct DiscrepancyReport {
    std::uint64_t n = 0;
    double value = 0.0;            // D*_n
    std::uint64_t sorted_rank = 0; // i in the sorted-points formula
    std::uint64_t orbit_index = 0; // k with {k alpha} = u_(i)
    bool upper_side = true;        // maximum from i/n - u_(i) (true) or u_(i) - (i-1)/n
};

inline constexpr std::uint64_t kDiscrepancyBudget = 10'000'000;

/// Exact star discrepancy of {alpha, 2 alpha, ..., n alpha} for the stored alpha.
inline DiscrepancyReport discrepancy_star(CirclePoint alpha, std::uint64_t n,
                                          std::uint64_t budget = kDiscrepancyBudget) {
    require(n >= 1, "discrepancy needs n >= 1");
    if (n > budget) fail(ErrorKind::BudgetExceeded, "discrepancy size " + std::to_string(n) + " exceeds budget");
    std::vector<std::pair<u128, std::uint64_t>> pts(n);
    CirclePoint p = alpha;
    for (std::uint64_t k = 1; k <= n; ++k) {
        pts[k - 1] = {p.raw(), k};
        p += alpha;
    }
    std::sort(pts.begin(), pts.end());
    // Compare (i*2^127 - n*u) and (n*u - (i-1)*2^127) exactly; the common
    // denominator n*2^127 is positive.
    using Wide = boost::multiprecision::int256_t;
    const Wide one = Wide(1) << kFracBits;
    Wide best = -1;
    DiscrepancyReport r;
    r.n = n;
    for (std::uint64_t i = 1; i <= n; ++i) {
        Wide u = Wide(static_cast<std::uint64_t>(pts[i - 1].first >> 64)) << 64;
        u += static_cast<std::uint64_t>(pts[i - 1].first);
        Wide nu = u * n;
        Wide upper = one * i - nu;
        Wide lower = nu - one * (i - 1);
        if (upper > best) { best = upper; r.sorted_rank = i; r.orbit_index = pts[i - 1].second; r.upper_side = true; }
        if (lower > best) { best = lower; r.sorted_rank = i; r.orbit_index = pts[i - 1].second; r.upper_side = false; }
    }
    r.value = static_cast<double>(std::ldexp(best.convert_to<long double>(), -kFracBits) / static_cast<long double>(n));
    return r;
}

inline DiscrepancyReport discrepancy_star(const RotationNumber& alpha, std::uint64_t n,
                                          std::uint64_t budget = kDiscrepancyBudget) {
    return discrepancy_star(alpha.value(), n, budget);
}

struct KoksmaCheck {
    double lhs = 0.0;   // |S_n f(x)|
    double rhs = 0.0;   // n Lip_xi(f) (D*_n)^xi
    double lip = 0.0;
    double discrepancy = 0.0;
    bool holds = false;
};

inline constexpr double kKoksmaRelativeSlack = 1e-9;

/// Holder-Koksma bound |S_n f(x)| <= n Lip_xi(f) (D*_n)^xi. The comparison
/// allows a relative slack of 1e-9 plus the summation error n 2^-50 ||f||.
inline KoksmaCheck koksma_check(const PiecewiseFn& f, double xi, const RotationNumber& alpha, CirclePoint x,
                                std::uint64_t n, std::optional<double> lip = std::nullopt) {
    require(n >= 1, "koksma check needs n >= 1");
    KoksmaCheck k;
    k.lip = lip ? *lip : f.lip_seminorm(xi);
    k.discrepancy = discrepancy_star(alpha, n).value;
    k.lhs = std::abs(birkhoff_sum(f, alpha.value(), x, n));
    k.rhs = static_cast<double>(n) * k.lip * std::pow(k.discrepancy, xi);
    double slack = k.rhs * kKoksmaRelativeSlack + static_cast<double>(n) * f.sup_norm() * std::ldexp(1.0, -50);
    k.holds = k.lhs <= k.rhs + slack;
    return k;
}

/// sum_{j = n_k}^{n_{k+1} - 1} f(x + j alpha) for consecutive breakpoints.
template <CircleFunction F>
std::vector<double> block_sums(const F& f, CirclePoint alpha, CirclePoint x,
                               const std::vector<std::uint64_t>& breakpoints) {
    require(breakpoints.size() >= 2, "block sums need at least two breakpoints");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        require(breakpoints[i] > breakpoints[i - 1], "breakpoints must be increasing");
    std::vector<double> out;
    out.reserve(breakpoints.size() - 1);
    CirclePoint p = x + alpha.times(breakpoints.front());
    detail::CompensatedSum whole;
    double abs_total = 0.0;
    for (std::size_t b = 0; b + 1 < breakpoints.size(); ++b) {
        detail::CompensatedSum block;
        for (std::uint64_t j = breakpoints[b]; j < breakpoints[b + 1]; ++j) {
            double v = f(p);
            block.add(v);
            whole.add(v);
            abs_total += std::abs(v);
            p += alpha;
        }
        out.push_back(static_cast<double>(block.value()));
    }
    detail::CompensatedSum recombined;
    for (double v : out) recombined.add(v);
    double tol = 1e-12 * (abs_total + 1.0);
    if (std::abs(static_cast<double>(recombined.value() - whole.value())) > tol)
        fail(ErrorKind::InvariantViolation, "block sums do not recombine to the full sum");
    return out;
}

struct HilbertSeries {
    std::vector<double> partial;   // index N: sum_{n=1}^N f(x + n alpha)/n; partial[0] = 0
    std::vector<double> running_sup;
};

template <CircleFunction F>
HilbertSeries hilbert_partial(const F& f, CirclePoint alpha, CirclePoint x, std::uint64_t N,
                              std::uint64_t budget = kSeriesBudget) {
    if (N > budget) fail(ErrorKind::BudgetExceeded, "series length " + std::to_string(N) + " exceeds budget");
    HilbertSeries h;
    h.partial.resize(N + 1);
    h.running_sup.resize(N + 1);
    detail::CompensatedSum acc;
    CirclePoint p = x;
    double sup = 0.0;
    for (std::uint64_t n = 1; n <= N; ++n) {
        p += alpha;
        acc.add(static_cast<long double>(f(p)) / static_cast<long double>(n));
        double v = static_cast<double>(acc.value());
        sup = std::max(sup, std::abs(v));
        h.partial[n] = v;
        h.running_sup[n] = sup;
    }
    return h;
}

/// -2 sum_{k>0} a^k Im G_N(k alpha) for every N' <= N, where
/// G_N(t) = sum_{n<=N} e^{2 pi i n t}/n. The k-series stops once a^k < 2^-60.
inline std::vector<double> hilbert_fourier_side(double a, CirclePoint alpha, std::uint64_t N,
                                                std::uint64_t budget = kSeriesBudget) {
    require(a > 0.0 && a < 1.0, "decay parameter a must be in (0, 1)");
    if (N > budget) fail(ErrorKind::BudgetExceeded, "series length " + std::to_string(N) + " exceeds budget");
    std::vector<detail::CompensatedSum> acc(N + 1);
    const double cutoff = std::ldexp(1.0, -60);
    long double weight = a;
    for (std::uint64_t k = 1; weight >= cutoff; ++k, weight *= a) {
        const CirclePoint t = alpha.times(k);
        // Im G_{N'}(t) accumulated for increasing N'.
        detail::CompensatedSum im;
        CirclePoint phase{};
        for (std::uint64_t n = 1; n <= N; ++n) {
            phase += t;
            im.add(static_cast<long double>(sin_two_pi(phase)) / static_cast<long double>(n));
            acc[n].add(-2.0L * weight * im.value());
        }
    }
    std::vector<double> out(N + 1, 0.0);
    for (std::uint64_t n = 1; n <= N; ++n) out[n] = static_cast<double>(acc[n].value());
    return out;
}

/// max over the grid t = i/grid and N <= n_max of |sum_{n<=N} sin(2 pi n t)/n|.
/// Phases advance by complex rotation, re-synchronised every 1024 steps.
inline double sine_series_sup(std::uint64_t grid, std::uint64_t n_max) {
    require(grid >= 1 && n_max >= 1, "grid and horizon must be >= 1");
    double sup = 0.0;
    for (std::uint64_t i = 0; i < grid; ++i) {
        const long double t = static_cast<long double>(i) / static_cast<long double>(grid);
        const CirclePoint tp = CirclePoint::from_raw(fraction_from_long_double(t));
        const std::complex<long double> w(cos_two_pi(tp), sin_two_pi(tp));
        std::complex<long double> z(1.0L, 0.0L);
        long double s = 0.0L;
        for (std::uint64_t n = 1; n <= n_max; ++n) {
            if (n % 1024 == 0) {
                CirclePoint ph = tp.times(n);
                z = {cos_two_pi(ph), sin_two_pi(ph)};
            } else {
                z *= w;
            }
            s += z.imag() / static_cast<long double>(n);
            sup = std::max(sup, static_cast<double>(std::abs(s)));
        }
    }
    return sup;
}

struct GrowthReport {
    bool degenerate = false;          // all S_n = 0: exponent undefined
    double exponent = std::numeric_limits<double>::quiet_NaN();
    double fit_residual = 0.0;
    std::vector<std::uint64_t> dyadic_n;       // right ends 2^k of the dyadic blocks used
    std::vector<double> dyadic_max;            // max_{m <= 2^k} |S_m|
    std::vector<double> decade_max;            // max over n in [10^d, 10^{d+1})
    double max_ratio = 0.0;                    // max_n |S_n| / psi(n)
    std::uint64_t max_ratio_at = 0;
};

inline GrowthReport growth_report(const BirkhoffSeries& s, const GrowthGauge& gauge) {
    const std::uint64_t N = s.length();
    require(N >= 16, "growth report needs at least 16 terms");
    GrowthReport r;
    for (std::uint64_t n = 1; n <= N; ++n) {
        double ratio = std::abs(s.sums[n]) / gauge(n);
        if (ratio > r.max_ratio) { r.max_ratio = ratio; r.max_ratio_at = n; }
    }
    for (std::uint64_t lo = 1; lo <= N; lo *= 10) {
        double m = 0.0;
        for (std::uint64_t n = lo; n < std::min<std::uint64_t>(lo * 10, N + 1); ++n) m = std::max(m, std::abs(s.sums[n]));
        r.decade_max.push_back(m);
    }
    if (s.running_max[N] == 0.0) {
        r.degenerate = true;
        return r;
    }
    std::vector<double> xs, ys;
    for (std::uint64_t n = 1; n <= N; n *= 2) {
        r.dyadic_n.push_back(n);
        r.dyadic_max.push_back(s.running_max[n]);
        if (s.running_max[n] > 0.0) {
            xs.push_back(std::log(static_cast<double>(n)));
            ys.push_back(std::log(s.running_max[n]));
        }
    }
    if (xs.size() < 2) {
        r.exponent = 0.0;
        return r;
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    r.exponent = sxy / sxx;
    double res = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double e = ys[i] - (my + r.exponent * (xs[i] - mx));
        res += e * e;
    }
    r.fit_residual = std::sqrt(res / static_cast<double>(xs.size()));
    return r;
}

} // namespace birkhoff_lab
