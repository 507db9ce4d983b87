#pragma once

// The superposition lambda [D(alpha) + eps D(-alpha)] S(r) |n> and its
// Fock-basis expansion.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "specfun.hpp"

namespace pbphase {

inline constexpr double pi = std::numbers::pi;

struct StateParams {
    int n = 0;            ///< Fock index of the seed state
    double alpha = 0.0;   ///< real displacement
    double r = 0.0;       ///< squeeze parameter, r >= 0
    double eps_mod = 0.0; ///< |eps|
    double eps_phase = 0.0; ///< arg(eps) in [0, 2 pi)

    /// Builds the parameters from a signed real eps (phase 0 or pi).
    static StateParams with_real_eps(int n, double alpha, double r, double eps) {
        return {n, alpha, r, std::fabs(eps), eps < 0 ? pi : 0.0};
    }

    bool has_real_eps() const noexcept { return eps_phase == 0.0 || eps_phase == pi; }

    /// Signed real eps; only meaningful when has_real_eps().
    double real_eps() const noexcept { return eps_phase == pi ? -eps_mod : eps_mod; }

    std::complex<double> eps() const {
        if (has_real_eps()) {
            return {real_eps(), 0.0};
        }
        return std::polar(eps_mod, eps_phase);
    }

    /// alpha cosh r + alpha* sinh r; equals tau() for real alpha.
    double t() const { return alpha * std::cosh(r) + alpha * std::sinh(r); }
    double tau() const { return alpha * std::exp(r); }

    void validate() const {
        if (n < 0) {
            throw std::invalid_argument("n must be non-negative");
        }
        if (!std::isfinite(alpha)) {
            throw std::invalid_argument("alpha must be finite");
        }
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw std::invalid_argument("squeeze parameter r must be finite and >= 0");
        }
        if (!(eps_mod >= 0.0) || !std::isfinite(eps_mod)) {
            throw std::invalid_argument("|eps| must be finite and >= 0");
        }
        if (!(eps_phase >= 0.0 && eps_phase < 2.0 * pi)) {
            throw std::invalid_argument("eps phase must lie in [0, 2 pi)");
        }
    }

    friend bool operator==(const StateParams&, const StateParams&) = default;
};

struct ExpansionOptions {
    double tol_norm = 1e-10;
    double r_switch = 1e-8;      ///< at or below: displaced-Fock closed form
    double tol_singular = 1e-12; ///< threshold on |lambda|^-2
    int max_degree = specfun::default_max_degree;
    std::optional<int> fixed_cutoff; ///< bypasses the adaptive cutoff search
};

/// |lambda_eps|^-2 = 1 + |eps|^2 + 2|eps| exp(-2|t|^2) L_n(4|t|^2) cos(phi).
inline double inverse_norm_squared(const StateParams& p) {
    p.validate();
    const double t2 = p.t() * p.t();
    const double overlap = std::exp(-2.0 * t2) * specfun::laguerre(p.n, 4.0 * t2);
    return 1.0 + p.eps_mod * p.eps_mod + 2.0 * p.eps_mod * overlap * std::cos(p.eps_phase);
}

inline double normalization_constant(const StateParams& p, double tol_singular = 1e-12) {
    const double inv = inverse_norm_squared(p);
    if (inv <= tol_singular) {
        throw SingularState("singular superposition: |lambda|^-2 = " + std::to_string(inv) +
                            " (eps = -1 with alpha = 0 is the zero vector)");
    }
    return 1.0 / std::sqrt(inv);
}

namespace detail {

// <m| D(alpha) |n> for real alpha, via the associated Laguerre form.
inline double displaced_fock_amplitude(int n, double alpha, int m, int max_degree) {
    using specfun::log_factorial;
    const int p = std::min(n, m);
    const int q = std::max(n, m);
    if (alpha == 0.0) {
        return m == n ? 1.0 : 0.0;
    }
    const double log_prefactor = 0.5 * (log_factorial(p) - log_factorial(q)) +
                                 (q - p) * std::log(std::fabs(alpha)) - 0.5 * alpha * alpha;
    int sign = ((n - p) % 2 == 0) ? 1 : -1;
    if (alpha < 0 && (q - p) % 2 == 1) {
        sign = -sign;
    }
    const double lag = specfun::assoc_laguerre(p, q - p, alpha * alpha, max_degree);
    return sign * std::exp(log_prefactor) * lag;
}

// <m| D(alpha) S(r) |n> for real alpha and r > 0. Each term of the finite
// j-sum is assembled in log space; the imaginary-argument Hermite factor is
// carried as (-1)^(n-j) (tanh r / 2)^((n-j)/2) G_{n-j}(alpha / sqrt(sinh 2r)).
inline double squeezed_displaced_amplitude(int n, double alpha, double r, int m,
                                           int max_degree) {
    using specfun::log_factorial;
    using specfun::SignedLogValue;

    const double th = std::tanh(r);
    const double th_minus_one = -2.0 / (std::exp(2.0 * r) + 1.0);
    const double sqrt_s2 = std::sqrt(std::sinh(2.0 * r));
    const double tau = alpha * std::exp(r);
    const double z = alpha / sqrt_s2;
    const double w = tau / sqrt_s2;
    const double log_half_th = std::log(0.5 * th);
    const double log_two_over_s = std::log(2.0 / sqrt_s2);

    const double common = 0.5 * m * log_half_th -
                          0.5 * (log_factorial(n) + log_factorial(m) + std::log(std::cosh(r))) +
                          0.5 * tau * tau * th_minus_one + log_factorial(n) + log_factorial(m);

    std::vector<SignedLogValue> terms;
    terms.reserve(std::min(m, n) + 1);
    for (int j = 0; j <= std::min(m, n); ++j) {
        const int k = n - j;
        const SignedLogValue g = specfun::hermite_imag_scaled_log(k, z, max_degree);
        const SignedLogValue h = specfun::hermite_log(m - j, w, max_degree);
        if (g.is_zero() || h.is_zero()) {
            continue;
        }
        const double log_mag = common - log_factorial(j) - log_factorial(k) -
                               log_factorial(m - j) + j * log_two_over_s + 0.5 * k * log_half_th +
                               g.log_magnitude + h.log_magnitude;
        const int sign = (k % 2 == 0 ? 1 : -1) * g.sign * h.sign;
        terms.push_back(SignedLogValue::from_log(sign, log_mag));
    }
    if (terms.empty()) {
        return 0.0;
    }
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.log_magnitude > b.log_magnitude; });
    const double scale = terms.front().log_magnitude;
    double sum = 0.0;
    for (const auto& term : terms) {
        sum += term.sign * std::exp(term.log_magnitude - scale);
    }
    SignedLogValue total = SignedLogValue::encode(sum);
    total.log_magnitude += scale;
    return total.decode();
}

} // namespace detail

/// <m| D(alpha) S(r) |n>, switching to the r = 0 closed form at small r.
inline double squeezed_displaced_amplitude(const StateParams& p, int m,
                                           const ExpansionOptions& opt = {}) {
    specfun::detail::check_degree(m, opt.max_degree, "coefficient index");
    if (p.r <= opt.r_switch) {
        return detail::displaced_fock_amplitude(p.n, p.alpha, m, opt.max_degree);
    }
    return detail::squeezed_displaced_amplitude(p.n, p.alpha, p.r, m, opt.max_degree);
}

/// Coefficient <m|psi> with lambda = 1. The parity factor [1 + (-1)^(n+m) eps]
/// produces exact zeros for eps = +-1.
inline std::complex<double> unnormalized_coefficient(const StateParams& p, int m,
                                                     const ExpansionOptions& opt = {}) {
    const double parity = ((p.n + m) % 2 == 0) ? 1.0 : -1.0;
    if (p.has_real_eps()) {
        const double factor = 1.0 + parity * p.real_eps();
        if (factor == 0.0) {
            return {0.0, 0.0};
        }
        return {factor * squeezed_displaced_amplitude(p, m, opt), 0.0};
    }
    const std::complex<double> factor = 1.0 + parity * p.eps();
    return factor * squeezed_displaced_amplitude(p, m, opt);
}

/// Truncated, renormalized Fock expansion. Immutable once built.
class FockExpansion {
public:
    FockExpansion(std::vector<std::complex<double>> coefficients, StateParams params,
                  double tail_mass, double lambda, double lambda_closed)
        : coefficients_(std::move(coefficients)), params_(params), tail_mass_(tail_mass),
          lambda_(lambda), lambda_closed_(lambda_closed) {
        if (coefficients_.empty()) {
            throw std::invalid_argument("FockExpansion needs at least one coefficient");
        }
    }

    /// An expansion from explicit amplitudes (normalized as given).
    static FockExpansion from_coefficients(std::vector<std::complex<double>> coefficients) {
        return FockExpansion(std::move(coefficients), StateParams{}, 0.0, 1.0, 1.0);
    }

    const std::vector<std::complex<double>>& coefficients() const noexcept {
        return coefficients_;
    }
    int cutoff() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }
    double tail_mass() const noexcept { return tail_mass_; }
    const StateParams& params() const noexcept { return params_; }
    /// lambda recomputed from the truncated vector.
    double lambda() const noexcept { return lambda_; }
    /// lambda from the closed-form normalization.
    double lambda_closed() const noexcept { return lambda_closed_; }

    std::complex<double> operator[](int m) const noexcept {
        return (m >= 0 && m <= cutoff()) ? coefficients_[m] : std::complex<double>{};
    }

    double norm() const noexcept {
        double s = 0.0;
        for (const auto& c : coefficients_) {
            s += std::norm(c);
        }
        return s;
    }

    bool all_real() const noexcept {
        return std::all_of(coefficients_.begin(), coefficients_.end(),
                           [](const auto& c) { return c.imag() == 0.0; });
    }

private:
    std::vector<std::complex<double>> coefficients_;
    StateParams params_;
    double tail_mass_;
    double lambda_;
    double lambda_closed_;
};

/// First cutoff tried by expand().
inline int initial_cutoff(const StateParams& p) {
    const double reach = std::fabs(p.alpha) * std::exp(p.r) + 4.0;
    const int by_alpha = static_cast<int>(std::ceil(reach * reach)) + 16;
    return std::max({4 * p.n, by_alpha, 32});
}

/// Builds the expansion, doubling the cutoff until the top eight coefficients
/// carry less than tol_norm / 100 and the retained mass matches the closed-form
/// normalization within tol_norm. The result is renormalized to unit norm.
inline FockExpansion expand(const StateParams& p, const ExpansionOptions& opt = {}) {
    p.validate();
    if (!p.has_real_eps()) {
        throw std::invalid_argument("Fock expansion supports real eps only (phase 0 or pi)");
    }
    if (!(opt.tol_norm > 0.0 && opt.tol_norm <= 1e-4)) {
        throw std::invalid_argument("tol_norm must lie in (0, 1e-4]");
    }
    const double lambda_closed = normalization_constant(p, opt.tol_singular);
    const double lambda_closed_sq = lambda_closed * lambda_closed;

    std::vector<std::complex<double>> raw;
    auto extend_to = [&](int cutoff) {
        for (int m = static_cast<int>(raw.size()); m <= cutoff; ++m) {
            raw.push_back(unnormalized_coefficient(p, m, opt));
        }
    };
    auto accepted = [&](int cutoff, double& total) {
        total = 0.0;
        for (int m = 0; m <= cutoff; ++m) {
            total += std::norm(raw[m]);
        }
        total *= lambda_closed_sq;
        double top = 0.0;
        for (int m = std::max(0, cutoff - 7); m <= cutoff; ++m) {
            top += std::norm(raw[m]);
        }
        top *= lambda_closed_sq;
        return top < opt.tol_norm * 1e-2 && std::fabs(total - 1.0) < opt.tol_norm;
    };

    double total = 0.0;
    int cutoff = 0;
    if (opt.fixed_cutoff) {
        cutoff = *opt.fixed_cutoff;
        if (cutoff < 0 || cutoff > opt.max_degree) {
            throw TruncationFailure("requested cutoff " + std::to_string(cutoff) +
                                    " outside [0, " + std::to_string(opt.max_degree) + "]");
        }
        extend_to(cutoff);
        if (!accepted(cutoff, total)) {
            throw TruncationFailure("cutoff " + std::to_string(cutoff) +
                                    " leaves discarded mass above tolerance (retained " +
                                    std::to_string(total) + ")");
        }
    } else {
        cutoff = std::min(initial_cutoff(p), opt.max_degree);
        for (;;) {
            extend_to(cutoff);
            if (accepted(cutoff, total)) {
                break;
            }
            if (cutoff >= opt.max_degree) {
                throw TruncationFailure("no cutoff up to the degree cap " +
                                        std::to_string(opt.max_degree) +
                                        " meets the norm tolerance");
            }
            cutoff = std::min(2 * cutoff, opt.max_degree);
        }
    }
    raw.resize(cutoff + 1);
    while (raw.size() > 1 && raw.back() == std::complex<double>{}) {
        raw.pop_back();
    }

    double raw_norm = 0.0;
    for (const auto& c : raw) {
        raw_norm += std::norm(c);
    }
    const double lambda = 1.0 / std::sqrt(raw_norm);
    for (auto& c : raw) {
        c *= lambda;
    }
    return FockExpansion(std::move(raw), p, std::max(0.0, 1.0 - total), lambda, lambda_closed);
}

/// Normalized coefficient C_m, using the lambda of the adaptive expansion.
inline std::complex<double> coefficient(const StateParams& p, int m,
                                        const ExpansionOptions& opt = {}) {
    specfun::detail::check_degree(m, opt.max_degree, "coefficient index");
    const FockExpansion e = expand(p, opt);
    if (m <= e.cutoff()) {
        return e[m];
    }
    return e.lambda() * unnormalized_coefficient(p, m, opt);
}

} // namespace pbphase
