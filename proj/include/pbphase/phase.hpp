#pragma once

// Pegg-Barnett phase distribution of a Fock expansion and the statistics
// derived from it: phase moments, photon-number moments, the number-phase
// commutator and the number/phase squeezing parameters.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "state.hpp"

namespace pbphase {

/// Uniform grid over [theta0, theta0 + 2 pi).
struct PhaseWindow {
    double theta0 = -pi;
    int points = 1024;

    double step() const noexcept { return 2.0 * pi / points; }
    double theta(int k) const noexcept { return theta0 + k * step(); }

    void validate() const {
        if (points < 2) {
            throw std::invalid_argument("phase window needs at least 2 points");
        }
        if (!std::isfinite(theta0)) {
            throw std::invalid_argument("theta0 must be finite");
        }
    }
};

/// Smallest alias-free resolution for an expansion truncated at `cutoff`.
inline int min_phase_points(int cutoff) { return 8 * (cutoff + 1); }

/// Default window for an expansion: at least `points`, raised to the
/// alias-free floor.
inline PhaseWindow window_for(const FockExpansion& e, double theta0 = -pi, int points = 1024) {
    return {theta0, std::max(points, min_phase_points(e.cutoff()))};
}

struct PhaseDistribution {
    PhaseWindow window;
    std::vector<double> values;

    /// Periodic trapezoidal integral over the window.
    double integral() const {
        double s = 0.0;
        for (double v : values) {
            s += v;
        }
        return s * window.step();
    }
};

/// sum_m C_m exp(i m theta), accumulated in ascending m.
inline std::complex<double> phase_amplitude(const FockExpansion& e, double theta) {
    std::complex<double> s{};
    const auto& c = e.coefficients();
    for (std::size_t m = 0; m < c.size(); ++m) {
        s += c[m] * std::polar(1.0, static_cast<double>(m) * theta);
    }
    return s;
}

/// Continuum phase density P(theta) = |sum_m C_m e^{i m theta}|^2 / (2 pi).
inline double phase_density(const FockExpansion& e, double theta) {
    return std::norm(phase_amplitude(e, theta)) / (2.0 * pi);
}

inline PhaseDistribution phase_distribution(const FockExpansion& e, const PhaseWindow& window) {
    window.validate();
    if (window.points < min_phase_points(e.cutoff())) {
        throw ResolutionTooLow("phase grid of " + std::to_string(window.points) +
                               " points is below 8 (cutoff + 1) = " +
                               std::to_string(min_phase_points(e.cutoff())));
    }
    PhaseDistribution d{window, std::vector<double>(window.points)};
    for (int k = 0; k < window.points; ++k) {
        d.values[k] = phase_density(e, window.theta(k));
    }
    return d;
}

struct PhasePoint {
    double theta;
    double weight; ///< (s + 1) / (2 pi) |<theta_m|psi>|^2
};

/// Finite (s + 1)-dimensional phase-state distribution, before the s -> inf
/// limit. The weights times 2 pi / (s + 1) sum to the retained norm.
inline std::vector<PhasePoint> finite_s_distribution(const FockExpansion& e, int s,
                                                     double theta0 = -pi) {
    if (s < e.cutoff()) {
        throw WindowTooSmall("s = " + std::to_string(s) + " is below the cutoff " +
                             std::to_string(e.cutoff()));
    }
    const auto& c = e.coefficients();
    const int top = std::min<int>(s, e.cutoff());
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(s) + 1.0);
    std::vector<PhasePoint> out(s + 1);
    for (int m = 0; m <= s; ++m) {
        const double theta = theta0 + 2.0 * pi * m / (s + 1.0);
        std::complex<double> overlap{};
        for (int k = 0; k <= top; ++k) {
            overlap += c[k] * std::polar(inv_sqrt, -k * theta);
        }
        out[m] = {theta, (s + 1.0) / (2.0 * pi) * std::norm(overlap)};
    }
    return out;
}

/// Sup-distance between the finite-s distribution, read as a step density
/// (each theta takes the weight of its nearest phase eigenvalue), and the
/// continuum density, sampled on `reference_points` uniform points.
inline double finite_s_deviation(const FockExpansion& e, int s, double theta0 = -pi,
                                 int reference_points = 8192) {
    const auto finite = finite_s_distribution(e, s, theta0);
    const double bin = 2.0 * pi / (s + 1.0);
    double worst = 0.0;
    for (int k = 0; k < reference_points; ++k) {
        const double theta = theta0 + 2.0 * pi * k / reference_points;
        const long nearest = std::lround((theta - theta0) / bin) % (s + 1);
        worst = std::max(worst, std::fabs(finite[nearest].weight - phase_density(e, theta)));
    }
    return worst;
}

struct PhaseMoments {
    double mean;
    double variance;
};

namespace detail {

// Composite Simpson over the closed window [theta0, theta0 + 2 pi]; the end
// value repeats the first (periodicity). An odd interval count finishes with
// the 3/8 rule on the last three intervals.
template <class F>
double simpson_closed(const PhaseDistribution& d, F weight) {
    const int n = d.window.points;
    const double h = d.window.step();
    auto f = [&](int k) {
        const double theta = d.window.theta0 + k * h;
        return weight(theta) * d.values[k % n];
    };
    const int simpson_intervals = (n % 2 == 0) ? n : n - 3;
    double s = 0.0;
    if (simpson_intervals > 0) {
        s = f(0) + f(simpson_intervals);
        for (int k = 1; k < simpson_intervals; ++k) {
            s += (k % 2 == 1 ? 4.0 : 2.0) * f(k);
        }
        s *= h / 3.0;
    }
    if (simpson_intervals != n) {
        const int k = simpson_intervals;
        s += 3.0 * h / 8.0 * (f(k) + 3.0 * f(k + 1) + 3.0 * f(k + 2) + f(k + 3));
    }
    return s;
}

} // namespace detail

inline PhaseMoments phase_moments(const PhaseDistribution& d) {
    if (d.window.points < 3 || static_cast<int>(d.values.size()) != d.window.points) {
        throw std::invalid_argument("phase distribution is malformed");
    }
    const double mean = detail::simpson_closed(d, [](double t) { return t; });
    const double second = detail::simpson_closed(d, [](double t) { return t * t; });
    return {mean, second - mean * mean};
}

/// Closed-form phase variance on the symmetric window [-pi, pi):
/// pi^2/3 + 4 Re S2 - 4 (Im S1)^2 with
/// S_p = sum_{m > m'} C_m C*_m' (-1)^(m - m') / (m - m')^p.
inline double phase_variance_closed(const FockExpansion& e) {
    const auto& c = e.coefficients();
    std::complex<double> s1{};
    std::complex<double> s2{};
    for (std::size_t m = 1; m < c.size(); ++m) {
        for (std::size_t mp = 0; mp < m; ++mp) {
            const double d = static_cast<double>(m - mp);
            const double sign = ((m - mp) % 2 == 0) ? 1.0 : -1.0;
            const std::complex<double> prod = c[m] * std::conj(c[mp]) * sign;
            s1 += prod / d;
            s2 += prod / (d * d);
        }
    }
    const double re_i_s1 = -s1.imag();
    return pi * pi / 3.0 + 4.0 * s2.real() - 4.0 * re_i_s1 * re_i_s1;
}

struct NumberMoments {
    double mean;
    double variance;
};

inline NumberMoments number_moments(const FockExpansion& e) {
    double first = 0.0;
    double second = 0.0;
    const auto& c = e.coefficients();
    for (std::size_t m = 0; m < c.size(); ++m) {
        const double p = std::norm(c[m]);
        first += static_cast<double>(m) * p;
        second += static_cast<double>(m) * static_cast<double>(m) * p;
    }
    return {first, second - first * first};
}

/// |<[n, Phi]>| = |1 - 2 pi P(theta0)|, theta0 being the window start.
inline double commutator_magnitude(const PhaseDistribution& d) {
    if (d.values.empty()) {
        throw std::invalid_argument("empty phase distribution");
    }
    return std::fabs(1.0 - 2.0 * pi * d.values.front());
}

/// Below this commutator magnitude S_N and S_theta are undefined.
inline constexpr double commutator_floor = 1e-9;

struct SqueezingParameters {
    std::optional<double> number; ///< S_N
    std::optional<double> phase;  ///< S_theta
};

inline SqueezingParameters squeezing_parameters(double n_variance, double phase_variance,
                                                double commutator_mag) {
    if (commutator_mag < commutator_floor) {
        return {};
    }
    const double half = 0.5 * commutator_mag;
    return {n_variance / half - 1.0, phase_variance / half - 1.0};
}

struct PhaseStatistics {
    double mean_phase = 0.0;
    double phase_variance = 0.0;
    double n_mean = 0.0;
    double n_variance = 0.0;
    double commutator_mag = 0.0;
    std::optional<double> s_number;
    std::optional<double> s_phase;
};

inline PhaseStatistics phase_statistics(const FockExpansion& e, const PhaseWindow& window) {
    const PhaseDistribution d = phase_distribution(e, window);
    const PhaseMoments pm = phase_moments(d);
    const NumberMoments nm = number_moments(e);
    const double comm = commutator_magnitude(d);
    const SqueezingParameters sq = squeezing_parameters(nm.variance, pm.variance, comm);
    return {pm.mean, pm.variance, nm.mean, nm.variance, comm, sq.number, sq.phase};
}

/// Strict local maxima on a periodic sample: v[k] must exceed both
/// neighbours by more than `plateau_tol`.
inline int count_local_maxima(std::span<const double> v, double plateau_tol = 1e-12) {
    const std::size_t n = v.size();
    if (n < 3) {
        return 0;
    }
    int count = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double left = v[(k + n - 1) % n];
        const double right = v[(k + 1) % n];
        if (v[k] - left > plateau_tol && v[k] - right > plateau_tol) {
            ++count;
        }
    }
    return count;
}

} // namespace pbphase
