#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numeric>

#include "birkhoff_lab/cf_arith.hpp"

using namespace birkhoff_lab;

namespace {

// Continued fraction of num/den by Euclid's algorithm.
std::vector<std::uint64_t> euclid_quotients(BigInt num, BigInt den, std::size_t count) {
    std::vector<std::uint64_t> out;
    // skip the integer part
    BigInt r = num % den;
    num = den;
    den = r;
    while (den != 0 && out.size() < count) {
        out.push_back((num / den).convert_to<std::uint64_t>());
        r = num % den;
        num = den;
        den = r;
    }
    return out;
}

BigInt pow10(unsigned e) { return boost::multiprecision::pow(BigInt(10), e); }

// floor(((sqrt 5) - 1)/2 * 10^200)
BigInt golden_digits() {
    BigInt scale = pow10(200);
    BigInt root = boost::multiprecision::sqrt(BigInt(5) * scale * scale);
    return (root - scale) / 2;
}

std::vector<std::uint64_t> fibonacci(std::size_t n) {
    std::vector<std::uint64_t> f{1, 1};
    while (f.size() < n) f.push_back(f[f.size() - 1] + f[f.size() - 2]);
    return f;
}

} // namespace

TEST(CfArith, GoldenQuotientsMatchBigIntegerOracle) {
    auto oracle = euclid_quotients(golden_digits(), pow10(200), 60);
    ASSERT_EQ(oracle.size(), 60u);
    auto q = partial_quotients(RotationNumber::golden(), 60);
    EXPECT_EQ(q, oracle);
    for (auto a : q) EXPECT_EQ(a, 1u);
}

TEST(CfArith, Sqrt2QuotientsMatchBigIntegerOracle) {
    BigInt scale = pow10(200);
    BigInt digits = boost::multiprecision::sqrt(BigInt(2) * scale * scale) - scale;
    auto oracle = euclid_quotients(digits, scale, 50);
    auto q = partial_quotients(RotationNumber::sqrt2_minus_1(), 50);
    EXPECT_EQ(q, oracle);
    for (auto a : q) EXPECT_EQ(a, 2u);
}

TEST(CfArith, GoldenValueIsCorrectlyRounded) {
    BigInt one = detail::from_u128(kOne);
    BigInt root = boost::multiprecision::sqrt(BigInt(5) * one * one * 4);  // floor(2^128 sqrt 5)
    BigInt twice = root - 2 * one;                                          // ~ 2^128 (sqrt5 - 1)
    BigInt expected = (twice + 2) / 4;                                      // round(2^127 (sqrt5 - 1)/2)
    BigInt got = detail::from_u128(RotationNumber::golden().value().raw());
    EXPECT_LE(boost::multiprecision::abs(got - expected), 1);
}

TEST(CfArith, RationalInputRejected) {
    EXPECT_THROW(
        {
            try {
                parse_alpha("quotients:2");
            } catch (const Error& e) {
                EXPECT_EQ(e.kind(), ErrorKind::RationalInput);
                throw;
            }
        },
        Error);
    auto fixture = RotationNumber::fixture(CirclePoint::from_double(0.25));
    EXPECT_THROW(partial_quotients(fixture, 3), Error);
}

TEST(CfArith, ParseAlphaForms) {
    EXPECT_EQ(parse_alpha("golden").value(), RotationNumber::golden().value());
    EXPECT_EQ(parse_alpha("sqrt2m1").value(), RotationNumber::sqrt2_minus_1().value());
    // [0; 1, 2, 2, 2, ...] = 1/sqrt 2
    EXPECT_NEAR(parse_alpha("quotients:1,periodic:2").value().to_double(), std::sqrt(0.5), 1e-15);
    EXPECT_EQ(parse_alpha("quotients:periodic:1").value(), RotationNumber::golden().value());
    EXPECT_THROW(parse_alpha("nonsense"), Error);
    EXPECT_EQ(parse_alpha("golden").source().text, "golden");
}

TEST(CfArith, DecimalSourceCertifiesOnlyWhatDigitsSupport) {
    std::string digits = golden_digits().str();
    auto alpha = parse_alpha("decimal:0." + digits.substr(0, 40) + "...");
    auto q = partial_quotients(alpha, 20);
    for (auto a : q) EXPECT_EQ(a, 1u);
    // 40 digits certify about 95 golden quotients at most; 127 bits fewer still.
    try {
        partial_quotients(alpha, 150);
        FAIL() << "expected PrecisionExhausted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::PrecisionExhausted);
    }
}

TEST(CfArith, QuotientReconstructionErrorBelowInverseSquare) {
    auto alpha = RotationNumber::from_quotients({3, 1, 4}, {1, 5});
    auto conv = convergents(alpha, 12);
    for (const auto& c : conv) {
        long double approx = static_cast<long double>(c.p) / static_cast<long double>(c.q);
        long double q2 = static_cast<long double>(c.q) * static_cast<long double>(c.q);
        EXPECT_LT(std::abs(alpha.value().to_long_double() - approx), 1.0L / q2);
    }
    EXPECT_EQ(partial_quotients(alpha, 7), (std::vector<std::uint64_t>{3, 1, 4, 1, 5, 1, 5}));
}

TEST(CfArith, GoldenDenominatorsAreFibonacci) {
    auto fib = fibonacci(45);
    auto q = denominators(RotationNumber::golden(), 40);
    for (std::size_t n = 0; n <= 40; ++n) EXPECT_EQ(q[n], fib[n]) << n;
    EXPECT_EQ(q[27], 317811u);
    EXPECT_EQ(q[28], 514229u);
    auto c = convergents(RotationNumber::golden(), 6);
    std::vector<BigInt> qs;
    for (const auto& x : c) qs.push_back(x.q);
    EXPECT_EQ(qs, (std::vector<BigInt>{1, 2, 3, 5, 8, 13}));
}

TEST(CfArith, Sqrt2ConvergentsByRecurrence) {
    auto c = convergents(RotationNumber::sqrt2_minus_1(), 4);
    std::vector<std::pair<int, int>> expect{{1, 2}, {2, 5}, {5, 12}, {12, 29}};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(c[i].p, expect[i].first);
        EXPECT_EQ(c[i].q, expect[i].second);
    }
    auto first = convergents(RotationNumber::from_quotients({7}, {1}), 1);
    EXPECT_EQ(first[0].p, 1);
    EXPECT_EQ(first[0].q, 7);
}

TEST(CfArith, ConvergentInvariants) {
    for (const auto& alpha : {RotationNumber::golden(), RotationNumber::sqrt2_minus_1(),
                              RotationNumber::from_quotients({1, 7, 2}, {3, 1, 15})}) {
        auto table = detail::convergent_table(alpha, 41);
        auto a = partial_quotients(alpha, 41);
        BigInt one = detail::from_u128(kOne);
        for (std::size_t k = 1; k <= 40; ++k) {
            const auto& c = table[k];
            // beyond q^2 ~ 2^120 the 2^-127 rounding of alpha dominates q alpha - p
            if (table[k + 1].q * table[k + 1].q > BigInt(1) << 120) break;
            const BigInt pm2 = k >= 2 ? table[k - 2].p : BigInt(1);
            const BigInt qm2 = k >= 2 ? table[k - 2].q : BigInt(0);
            EXPECT_EQ(c.p, a[k - 1] * table[k - 1].p + pm2);
            EXPECT_EQ(c.q, a[k - 1] * table[k - 1].q + qm2);
            EXPECT_EQ(boost::multiprecision::gcd(c.p, c.q), 1);
            EXPECT_EQ(c.sign(), k % 2 == 0 ? 1 : -1);
            // 1/(q_k + q_{k+1}) < |q_k alpha - p_k| < 1/q_{k+1}, all scaled by 2^127
            const BigInt& qn = table[k + 1].q;
            EXPECT_LT(one, c.abs_scaled_error() * (c.q + qn));
            EXPECT_LT(c.abs_scaled_error() * qn, one);
        }
    }
}

TEST(CfArith, TypeExponents) {
    auto te = type_exponents(RotationNumber::golden(), 25);
    // q_2 = 2, q_4 = 5
    ASSERT_EQ(te.index[0], 2u);
    EXPECT_NEAR(te.tau[0], std::log(5.0) / std::log(2.0), 1e-12);
    auto fib = fibonacci(30);
    std::size_t pos = 20 - te.index[0];
    EXPECT_NEAR(te.tau[pos], std::log(static_cast<double>(fib[22])) / std::log(static_cast<double>(fib[20])), 1e-12);
    EXPECT_NEAR(te.tau[pos], 1.1035, 5e-4);
    for (double t : te.tau) EXPECT_GE(t, 1.0);
    EXPECT_THROW(type_exponents(RotationNumber::golden(), 2), Error);
}
