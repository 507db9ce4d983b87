#pragma once

// Independent check of the Fock coefficients: direct quadrature of the
// overlap <m|psi> = int Upsilon_m(q) Upsilon(q) dq using only the
// position-space wavefunctions, never the closed-form coefficient sums.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "state.hpp"
#include "wigner.hpp"

namespace pbphase::oracle {

inline constexpr int max_refinement_depth = 24;

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    if (depth >= max_refinement_depth) {
        throw QuadratureFailure("adaptive Simpson did not converge within " +
                                std::to_string(max_refinement_depth) + " levels near x = " +
                                std::to_string(m));
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

} // namespace detail

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`. The interval is
/// first cut into `panels` equal pieces so narrow features are not stepped
/// over by the coarsest sample.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol, int panels = 32) {
    if (!(b > a)) {
        return 0.0;
    }
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * width;
        const double hi = (k + 1 == panels) ? b : lo + width;
        const double flo = f(lo);
        const double fhi = f(hi);
        const double fmid = f(0.5 * (lo + hi));
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += detail::simpson_step(f, lo, hi, flo, fmid, fhi, whole, tol / panels, 0);
    }
    return total;
}

/// Half-width of the integration range for <m|psi>.
inline double integration_half_width(const StateParams& p, int m) {
    return std::numbers::sqrt2 * std::fabs(p.alpha) +
           (8.0 + std::sqrt(2.0 * (m + p.n) + 1.0)) * std::max(1.0, std::exp(-p.r));
}

/// <m|psi> by quadrature of the wavefunction overlap.
inline std::complex<double> overlap_coefficient(const StateParams& p, int m, double tol) {
    if (!(tol >= 1e-12 && tol <= 1e-6)) {
        throw std::invalid_argument("oracle tolerance must lie in [1e-12, 1e-6]");
    }
    if (m < 0) {
        throw std::invalid_argument("negative Fock index");
    }
    p.validate();
    const Wavefunction fock(StateParams{m, 0.0, 0.0, 0.0, 0.0});
    const Wavefunction psi(p);
    const double half = integration_half_width(p, m);
    const double re = adaptive_simpson(
        [&](double q) { return fock(q).real() * psi(q).real(); }, -half, half, tol);
    if (p.has_real_eps()) {
        return {re, 0.0};
    }
    const double im = adaptive_simpson(
        [&](double q) { return fock(q).real() * psi(q).imag(); }, -half, half, tol);
    return {re, im};
}

struct ReportRow {
    int m;
    std::complex<double> closed;
    std::complex<double> oracle;
    double delta;
};

struct PathError {
    ErrorKind kind;
    std::string message;
};

struct ExpansionReport {
    StateParams params;
    std::vector<ReportRow> rows;
    double max_delta = 0.0;
    double tol = 0.0;
    std::optional<PathError> closed_error;
    std::optional<PathError> oracle_error;
    bool passed = false;
};

/// Tabulates closed-form and quadrature coefficients for m = 0..m_max. Passes
/// iff both paths succeed and max |delta| < 10 tol. Domain errors land in the
/// report instead of propagating.
inline ExpansionReport verify_expansion(const StateParams& p, int m_max, double tol,
                                        const ExpansionOptions& opt = {}) {
    specfun::detail::check_degree(m_max, opt.max_degree, "verify_expansion m_max");
    ExpansionReport report;
    report.params = p;
    report.tol = tol;

    std::vector<std::complex<double>> closed;
    try {
        const FockExpansion e = expand(p, opt);
        for (int m = 0; m <= m_max; ++m) {
            closed.push_back(m <= e.cutoff() ? e[m]
                                             : e.lambda() * unnormalized_coefficient(p, m, opt));
        }
    } catch (const Error& err) {
        report.closed_error = PathError{err.kind(), err.what()};
    }

    std::vector<std::complex<double>> quad;
    try {
        for (int m = 0; m <= m_max; ++m) {
            quad.push_back(overlap_coefficient(p, m, tol));
        }
    } catch (const Error& err) {
        report.oracle_error = PathError{err.kind(), err.what()};
    }

    if (!report.closed_error && !report.oracle_error) {
        for (int m = 0; m <= m_max; ++m) {
            const double d = std::abs(closed[m] - quad[m]);
            report.rows.push_back({m, closed[m], quad[m], d});
            report.max_delta = std::max(report.max_delta, d);
        }
        report.passed = report.max_delta < 10.0 * tol;
    }
    return report;
}

} // namespace pbphase::oracle
