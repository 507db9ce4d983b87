#pragma once

// Position-space wavefunction and Wigner function of the superposition, in
// units with omega = hbar = 1. The wavefunction lives on the position
// quadrature q = (a + a^dagger) / sqrt(2); the Wigner function uses the
// phase-space plane beta = x + i y, so q = sqrt(2) x.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "specfun.hpp"
#include "state.hpp"

namespace pbphase {

/// <q|psi> as a reusable callable; lambda is computed once at construction.
/// Each displaced component is e^{r/2} pi^{-1/4} times the Hermite function of
/// order n at e^r (q -+ sqrt(2) alpha).
class Wavefunction {
public:
    explicit Wavefunction(const StateParams& p)
        : params_(p), shift_(std::numbers::sqrt2 * p.alpha), stretch_(std::exp(p.r)),
          prefactor_(normalization_constant(p) * std::exp(0.5 * p.r) / std::sqrt(std::sqrt(pi))) {}

    std::complex<double> operator()(double q) const {
        const double plus = specfun::hermite_function(params_.n, stretch_ * (q - shift_));
        const double minus = specfun::hermite_function(params_.n, stretch_ * (q + shift_));
        if (params_.has_real_eps()) {
            return {prefactor_ * (plus + params_.real_eps() * minus), 0.0};
        }
        return prefactor_ * (plus + params_.eps() * minus);
    }

private:
    StateParams params_;
    double shift_;
    double stretch_;
    double prefactor_;
};

inline std::complex<double> wavefunction(const StateParams& p, double q) {
    return Wavefunction(p)(q);
}

/// W(x, y) in closed form: two squeezed displaced Fock lobes at x = -+alpha
/// plus the interference term carrying cos(4 y alpha - phi).
inline double wigner_value(const StateParams& p, double x, double y) {
    const double lambda = normalization_constant(p);
    const double e2r = std::exp(2.0 * p.r);
    const double y_part = y * y / e2r;
    auto lobe = [&](double u) {
        const double q = y_part + e2r * u * u;
        return std::exp(-2.0 * q) * specfun::laguerre(p.n, 4.0 * q);
    };
    const double parity = (p.n % 2 == 0) ? 1.0 : -1.0;
    const double bracket = p.eps_mod * p.eps_mod * lobe(x + p.alpha) + lobe(x - p.alpha) +
                           2.0 * p.eps_mod * lobe(x) * std::cos(4.0 * y * p.alpha - p.eps_phase);
    return 2.0 * parity * lambda * lambda / pi * bracket;
}

struct GridSpec {
    double x_min = -5.0;
    double x_max = 5.0;
    double y_min = -5.0;
    double y_max = 5.0;
    int nx = 201;
    int ny = 201;

    double dx() const noexcept { return (x_max - x_min) / (nx - 1); }
    double dy() const noexcept { return (y_max - y_min) / (ny - 1); }
    double x(int i) const noexcept { return x_min + i * dx(); }
    double y(int j) const noexcept { return y_min + j * dy(); }

    void validate() const {
        if (nx < 2 || ny < 2) {
            throw std::invalid_argument("Wigner grid needs at least 2 nodes per axis");
        }
        if (!(x_max > x_min) || !(y_max > y_min)) {
            throw std::invalid_argument("Wigner grid ranges must be increasing");
        }
    }
};

/// Fewest y nodes that resolve the cos(4 y alpha) fringes.
inline int min_fringe_nodes(double y_min, double y_max, double alpha) {
    return static_cast<int>(std::ceil(8.0 * (y_max - y_min) * std::fabs(alpha) / pi));
}

/// Envelope covering four widths of every Gaussian factor, 201 x 201 nodes
/// (more along y when the fringes demand it).
inline GridSpec default_grid_spec(const StateParams& p) {
    const double x_half = std::fabs(p.alpha) + 4.0 * std::max(1.0, std::exp(-p.r));
    const double y_half = 4.0 * std::max(1.0, std::exp(p.r));
    GridSpec g{-x_half, x_half, -y_half, y_half, 201, 201};
    g.ny = std::max(g.ny, min_fringe_nodes(g.y_min, g.y_max, p.alpha));
    return g;
}

struct WignerGrid {
    GridSpec spec;
    std::vector<double> values; ///< row-major, values[i * ny + j] = W(x_i, y_j)

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * spec.ny + j]; }

    /// Double trapezoidal integral over the grid.
    double integral() const {
        double s = 0.0;
        for (int i = 0; i < spec.nx; ++i) {
            const double wx = (i == 0 || i == spec.nx - 1) ? 0.5 : 1.0;
            for (int j = 0; j < spec.ny; ++j) {
                const double wy = (j == 0 || j == spec.ny - 1) ? 0.5 : 1.0;
                s += wx * wy * at(i, j);
            }
        }
        return s * spec.dx() * spec.dy();
    }
};

inline WignerGrid wigner_grid(const StateParams& p, const GridSpec& spec) {
    p.validate();
    spec.validate();
    const int needed = min_fringe_nodes(spec.y_min, spec.y_max, p.alpha);
    if (spec.ny < needed) {
        throw ResolutionTooLow("ny = " + std::to_string(spec.ny) +
                               " cannot resolve the interference fringes; need >= " +
                               std::to_string(needed));
    }
    normalization_constant(p);
    WignerGrid g{spec, std::vector<double>(static_cast<std::size_t>(spec.nx) * spec.ny)};
    for (int i = 0; i < spec.nx; ++i) {
        for (int j = 0; j < spec.ny; ++j) {
            g.values[static_cast<std::size_t>(i) * spec.ny + j] =
                wigner_value(p, spec.x(i), spec.y(j));
        }
    }
    return g;
}

struct MarginalPoint {
    double q;       ///< position quadrature, sqrt(2) x
    double density; ///< probability density in q
};

/// Position distribution from the Wigner grid: trapezoidal integral over y,
/// mapped to the quadrature q = sqrt(2) x so it compares directly with
/// |wavefunction(q)|^2.
inline std::vector<MarginalPoint> x_marginal(const WignerGrid& g) {
    std::vector<MarginalPoint> out(g.spec.nx);
    for (int i = 0; i < g.spec.nx; ++i) {
        double s = 0.0;
        for (int j = 0; j < g.spec.ny; ++j) {
            const double wy = (j == 0 || j == g.spec.ny - 1) ? 0.5 : 1.0;
            s += wy * g.at(i, j);
        }
        s *= g.spec.dy();
        out[i] = {std::numbers::sqrt2 * g.spec.x(i), s / std::numbers::sqrt2};
    }
    return out;
}

} // namespace pbphase
