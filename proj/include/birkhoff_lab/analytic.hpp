#pragma once

// Closed-form functions on T: the Hilbert-transform example and trigonometric
// polynomials, with the coboundary transfer h = g(. + alpha) - g.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "birkhoff_lab/error.hpp"
#include "birkhoff_lab/fixed_point.hpp"

namespace birkhoff_lab {

/// f(x) = -2a sin(2 pi x) / (1 - 2a cos(2 pi x) + a^2), Fourier coefficients
/// i a^n (n > 0) and -i a^{-n} (n < 0).
class HilbertExample {
public:
    explicit HilbertExample(double a) : a_(a) { require(a > 0.0 && a < 1.0, "a must be in (0, 1)"); }

    double a() const { return a_; }

    double operator()(CirclePoint x) const {
        long double s = sin_two_pi(x), c = cos_two_pi(x);
        long double a = a_;
        return static_cast<double>(-2.0L * a * s / (1.0L - 2.0L * a * c + a * a));
    }

private:
    double a_;
};

inline double hilbert_example_eval(double a, CirclePoint x) { return HilbertExample(a)(x); }

/// Real trigonometric polynomial sum_k c_k e^{2 pi i k x}, stored for k > 0
/// with c_{-k} = conj(c_k) implied.
class TrigPolynomial {
public:
    TrigPolynomial() = default;

    /// Coefficients for k = 1..; c_0 is taken to be `mean`.
    explicit TrigPolynomial(std::map<std::int64_t, std::complex<double>> positive, double mean = 0.0)
        : coeffs_(std::move(positive)), mean_(mean) {
        for (const auto& [k, c] : coeffs_) require(k > 0, "store only positive frequencies");
    }

    /// sqrt(2) cos(2 pi x): unit L2 norm, zero mean.
    static TrigPolynomial sqrt2_cos() {
        return TrigPolynomial({{1, {std::numbers::sqrt2 / 2.0, 0.0}}});
    }
    static TrigPolynomial sin1() { return TrigPolynomial({{1, {0.0, -0.5}}}); }

    const std::map<std::int64_t, std::complex<double>>& coefficients() const { return coeffs_; }
    double mean() const { return mean_; }

    double operator()(CirclePoint x) const {
        long double v = mean_;
        for (const auto& [k, c] : coeffs_) {
            CirclePoint ph = x.times(static_cast<std::uint64_t>(k));
            v += 2.0L * (static_cast<long double>(c.real()) * cos_two_pi(ph) -
                         static_cast<long double>(c.imag()) * sin_two_pi(ph));
        }
        return static_cast<double>(v);
    }

    double sup_bound() const {
        double s = std::abs(mean_);
        for (const auto& [k, c] : coeffs_) s += 2.0 * std::abs(c);
        return s;
    }

    /// L2 norm squared, by Parseval.
    double l2_squared() const {
        double s = mean_ * mean_;
        for (const auto& [k, c] : coeffs_) s += 2.0 * std::norm(c);
        return s;
    }

private:
    std::map<std::int64_t, std::complex<double>> coeffs_;
    double mean_ = 0.0;
};

inline constexpr double kSmallDenominator = 1e-12;

struct TransferResult {
    TrigPolynomial h;
    TrigPolynomial g;          // h = g(. + alpha) - g
    CirclePoint alpha;
    double bound = 0.0;        // C = 2 sum_k |g_k| over all k != 0
    double identity_error = 0.0;
};

/// Solves h = g o R_alpha - g coefficientwise: g_k = h_k / (e^{2 pi i k alpha} - 1).
inline TransferResult trig_coboundary_transfer(const TrigPolynomial& h, CirclePoint alpha,
                                               std::uint64_t check_points = 1000) {
    require(h.mean() == 0.0, "h must have zero mean");
    std::map<std::int64_t, std::complex<double>> g;
    double bound = 0.0;
    for (const auto& [k, c] : h.coefficients()) {
        require(k <= 10000, "degree above 10^4");
        CirclePoint ph = alpha.times(static_cast<std::uint64_t>(k));
        double dist = fraction_to_double(std::min(ph.raw(), kOne - ph.raw()));
        if (dist < kSmallDenominator)
            fail(ErrorKind::SmallDenominator,
                 "||k alpha|| = " + std::to_string(dist) + " at k = " + std::to_string(k));
        std::complex<long double> e(cos_two_pi(ph), sin_two_pi(ph));
        std::complex<long double> gk = std::complex<long double>(c.real(), c.imag()) / (e - 1.0L);
        g[k] = {static_cast<double>(gk.real()), static_cast<double>(gk.imag())};
        bound += 2.0 * 2.0 * static_cast<double>(std::abs(gk));  // |g_k| and |g_{-k}|
    }
    TransferResult r{h, TrigPolynomial(std::move(g)), alpha, bound, 0.0};
    for (std::uint64_t i = 0; i < check_points; ++i) {
        CirclePoint x = CirclePoint::from_raw(fraction_from_long_double(
            (static_cast<long double>(i) + 0.5L) / static_cast<long double>(check_points)));
        double err = std::abs(h(x) - (r.g(x + alpha) - r.g(x)));
        r.identity_error = std::max(r.identity_error, err);
    }
    if (r.identity_error > 1e-9)
        fail(ErrorKind::InvariantViolation,
             "coboundary identity fails by " + std::to_string(r.identity_error));
    return r;
}

} // namespace birkhoff_lab
