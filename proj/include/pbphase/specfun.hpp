#pragma once

// Orthogonal polynomials and factorial prefactors used by the Fock-space
// formulas. Polynomials are evaluated by their three-term recurrences in
// plain floating point; the *_log variants carry an exponent alongside the
// mantissa so high degrees never overflow.

#include <cmath>
#include <concepts>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"

namespace pbphase::specfun {

inline constexpr int default_max_degree = 512;

/// A real number stored as sign * exp(log_magnitude).
struct SignedLogValue {
    int sign = 0;               ///< -1, 0 or +1
    double log_magnitude = 0.0; ///< ignored when sign == 0

    static SignedLogValue zero() noexcept { return {}; }

    static SignedLogValue from_log(int sign, double log_magnitude) noexcept {
        return sign == 0 ? zero() : SignedLogValue{sign > 0 ? 1 : -1, log_magnitude};
    }

    static SignedLogValue encode(double v) noexcept {
        if (v == 0.0 || std::isnan(v)) {
            return zero();
        }
        return {v > 0 ? 1 : -1, std::log(std::fabs(v))};
    }

    double decode() const noexcept {
        return sign == 0 ? 0.0 : sign * std::exp(log_magnitude);
    }

    bool is_zero() const noexcept { return sign == 0; }

    friend SignedLogValue operator*(SignedLogValue a, SignedLogValue b) noexcept {
        return from_log(a.sign * b.sign, a.log_magnitude + b.log_magnitude);
    }

    friend SignedLogValue operator/(SignedLogValue a, SignedLogValue b) {
        if (b.sign == 0) {
            throw std::domain_error("SignedLogValue: division by zero");
        }
        return from_log(a.sign * b.sign, a.log_magnitude - b.log_magnitude);
    }

    SignedLogValue operator-() const noexcept { return from_log(-sign, log_magnitude); }
};

namespace detail {

inline void check_degree(int k, int max_degree, const char* what) {
    if (k < 0) {
        throw std::invalid_argument(std::string(what) + ": negative degree");
    }
    if (k > max_degree) {
        throw DegreeTooLarge(std::string(what) + ": degree " + std::to_string(k) +
                             " exceeds cap " + std::to_string(max_degree));
    }
}

// Runs p_{j+1} = a(j) p_j + b(j) p_{j-1} from (p_0, p_1) up to p_k.
template <std::floating_point T, class StepA, class StepB>
T three_term(int k, T p0, T p1, StepA a, StepB b) {
    if (k == 0) {
        return p0;
    }
    T prev = p0;
    T cur = p1;
    for (int j = 1; j < k; ++j) {
        const T next = a(j) * cur + b(j) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// Same recurrence with the pair rescaled whenever it grows past 2^400, the
// removed factor accumulated in log space.
template <class StepA, class StepB>
SignedLogValue three_term_log(int k, double p0, double p1, StepA a, StepB b) {
    constexpr double big = 0x1p400;
    const double log_big = std::log(big);
    if (k == 0) {
        return SignedLogValue::encode(p0);
    }
    double prev = p0;
    double cur = p1;
    double log_scale = 0.0;
    for (int j = 1; j < k; ++j) {
        const double next = a(j) * cur + b(j) * prev;
        prev = cur;
        cur = next;
        if (std::fabs(cur) > big) {
            cur /= big;
            prev /= big;
            log_scale += log_big;
        }
    }
    SignedLogValue out = SignedLogValue::encode(cur);
    out.log_magnitude += log_scale;
    return out;
}

} // namespace detail

/// Physicists' Hermite polynomial H_k(x).
template <std::floating_point T>
T hermite(int k, T x, int max_degree = default_max_degree) {
    detail::check_degree(k, max_degree, "hermite");
    return detail::three_term<T>(
        k, T(1), T(2) * x, [x](int) { return T(2) * x; },
        [](int j) { return T(-2) * T(j); });
}

/// G_k(z) = (-i)^k H_k(iz), so that H_k(iz) = i^k G_k(z). All coefficients of
/// G_k are non-negative, which makes it the natural real-valued carrier of the
/// imaginary-argument Hermite factor.
template <std::floating_point T>
T hermite_imag_scaled(int k, T z, int max_degree = default_max_degree) {
    detail::check_degree(k, max_degree, "hermite_imag_scaled");
    return detail::three_term<T>(
        k, T(1), T(2) * z, [z](int) { return T(2) * z; },
        [](int j) { return T(2) * T(j); });
}

template <std::floating_point T>
T laguerre(int k, T x, int max_degree = default_max_degree) {
    detail::check_degree(k, max_degree, "laguerre");
    return detail::three_term<T>(
        k, T(1), T(1) - x,
        [x](int j) { return (T(2 * j + 1) - x) / T(j + 1); },
        [](int j) { return -T(j) / T(j + 1); });
}

/// Generalized Laguerre L_k^a(x), recurrence in k at fixed order a.
template <std::floating_point T>
T assoc_laguerre(int k, int a, T x, int max_degree = default_max_degree) {
    detail::check_degree(k, max_degree, "assoc_laguerre");
    detail::check_degree(a, max_degree, "assoc_laguerre (order)");
    return detail::three_term<T>(
        k, T(1), T(1 + a) - x,
        [x, a](int j) { return (T(2 * j + 1 + a) - x) / T(j + 1); },
        [a](int j) { return -T(j + a) / T(j + 1); });
}

/// ln H_k(x) with sign; never overflows.
inline SignedLogValue hermite_log(int k, double x, int max_degree = default_max_degree) {
    detail::check_degree(k, max_degree, "hermite_log");
    return detail::three_term_log(
        k, 1.0, 2.0 * x, [x](int) { return 2.0 * x; }, [](int j) { return -2.0 * j; });
}

/// ln G_k(z) with sign; see hermite_imag_scaled.
inline SignedLogValue hermite_imag_scaled_log(int k, double z,
                                              int max_degree = default_max_degree) {
    detail::check_degree(k, max_degree, "hermite_imag_scaled_log");
    return detail::three_term_log(
        k, 1.0, 2.0 * z, [z](int) { return 2.0 * z; }, [](int j) { return 2.0 * j; });
}

/// ln(k!). Cumulative sums for k < 4096 are tabulated once on first use.
inline double log_factorial(int k) {
    constexpr int table_size = 4096;
    if (k < 0) {
        throw std::invalid_argument("log_factorial: negative argument");
    }
    static const std::vector<double> table = [] {
        std::vector<double> t(table_size);
        t[0] = 0.0;
        for (int i = 1; i < table_size; ++i) {
            t[i] = t[i - 1] + std::log(static_cast<double>(i));
        }
        return t;
    }();
    if (k < table_size) {
        return table[k];
    }
    return std::lgamma(static_cast<double>(k) + 1.0);
}

/// Hermite function H_k(x) exp(-x^2/2) / sqrt(2^k k!), assembled in log
/// space. Multiply by pi^(-1/4) for the normalized oscillator eigenfunction.
inline double hermite_function(int k, double x, int max_degree = default_max_degree) {
    const SignedLogValue h = hermite_log(k, x, max_degree);
    if (h.is_zero()) {
        return 0.0;
    }
    return SignedLogValue::from_log(h.sign, h.log_magnitude - 0.5 * x * x -
                                                0.5 * (k * std::numbers::ln2 + log_factorial(k)))
        .decode();
}

} // namespace pbphase::specfun
