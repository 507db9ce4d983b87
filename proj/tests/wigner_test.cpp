#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "pbphase/oracle.hpp"
#include "pbphase/wigner.hpp"

using namespace pbphase;

namespace {

std::vector<StateParams> lattice() {
    std::vector<StateParams> out;
    for (int n : {0, 1, 2, 3}) {
        for (double a : {0.0, 0.5, 1.0, 2.0}) {
            for (double r : {0.0, 0.25, 0.5, 1.0}) {
                for (double eps : {0.0, 1.0, -1.0}) {
                    if (!(eps == -1.0 && a == 0.0)) {
                        out.push_back(StateParams::with_real_eps(n, a, r, eps));
                    }
                }
            }
        }
    }
    return out;
}

std::string describe(const StateParams& p) {
    return "n=" + std::to_string(p.n) + " alpha=" + std::to_string(p.alpha) +
           " r=" + std::to_string(p.r) + " eps=" + std::to_string(p.real_eps());
}

} // namespace

TEST(Wavefunction, GroundState) {
    const Wavefunction psi(StateParams{});
    for (double q : {-2.0, -0.5, 0.0, 1.3}) {
        EXPECT_NEAR(psi(q).real(), std::pow(pi, -0.25) * std::exp(-0.5 * q * q), 1e-15);
        EXPECT_EQ(psi(q).imag(), 0.0);
    }
}

TEST(Wavefunction, OddNodeAtOrigin) {
    EXPECT_NEAR(wavefunction(StateParams::with_real_eps(1, 0.0, 0.0, 1.0), 0.0).real(), 0.0, 1e-15);
}

TEST(Wavefunction, SingularStatePropagates) {
    EXPECT_THROW(Wavefunction(StateParams::with_real_eps(2, 0.0, 0.5, -1.0)), SingularState);
}

TEST(Wavefunction, UnitNormAcrossLattice) {
    for (const auto& p : lattice()) {
        const Wavefunction psi(p);
        const double half = oracle::integration_half_width(p, 0);
        const double norm = oracle::adaptive_simpson(
            [&](double q) { return std::norm(psi(q)); }, -half, half, 1e-11);
        EXPECT_NEAR(norm, 1.0, 1e-8) << describe(p);
    }
}

TEST(WignerValue, CoherentPeak) {
    for (double a : {0.0, 0.7, 2.0}) {
        EXPECT_NEAR(wigner_value(StateParams::with_real_eps(0, a, 0.0, 0.0), a, 0.0), 2.0 / pi, 1e-15);
    }
}

TEST(WignerValue, SinglePhotonDip) {
    EXPECT_NEAR(wigner_value(StateParams::with_real_eps(1, 0.0, 0.0, 0.0), 0.0, 0.0), -2.0 / pi, 1e-15);
}

TEST(WignerValue, EvenInY) {
    for (const auto& p : lattice()) {
        for (double x : {-1.1, 0.0, 0.4, 2.0}) {
            for (double y : {0.3, 0.9, 1.7}) {
                ASSERT_NEAR(wigner_value(p, x, y), wigner_value(p, x, -y), 1e-12) << describe(p);
            }
        }
    }
}

TEST(WignerValue, EvenCatPointParity) {
    for (const auto& p : lattice()) {
        if (p.real_eps() != 1.0) {
            continue;
        }
        for (double x : {-1.1, 0.0, 0.4, 2.0}) {
            for (double y : {0.0, 0.3, 1.7}) {
                ASSERT_NEAR(wigner_value(p, x, y), wigner_value(p, -x, -y), 1e-12) << describe(p);
            }
        }
    }
}

TEST(WignerValue, ComplexPhaseShiftsFringes) {
    const StateParams p{0, 1.0, 0.0, 1.0, pi / 2};
    const double expect_shift = pi / 8.0; // 4 y alpha - phi vanishes at y = pi / 8
    EXPECT_GT(wigner_value(p, 0.0, expect_shift), wigner_value(p, 0.0, 0.0));
}

TEST(WignerGrid, IntegratesToOneAcrossLattice) {
    for (const auto& p : lattice()) {
        const WignerGrid g = wigner_grid(p, default_grid_spec(p));
        EXPECT_NEAR(g.integral(), 1.0, 1e-6) << describe(p);
    }
}

TEST(WignerGrid, DefaultEnvelope) {
    const auto p = StateParams::with_real_eps(1, 2.0, 1.0, 1.0);
    const GridSpec g = default_grid_spec(p);
    EXPECT_DOUBLE_EQ(g.x_max, 6.0);
    EXPECT_DOUBLE_EQ(g.y_max, 4.0 * std::exp(1.0));
    EXPECT_EQ(g.nx, 201);
    EXPECT_GE(g.ny, min_fringe_nodes(g.y_min, g.y_max, p.alpha));
}

TEST(WignerGrid, FringeResolutionEnforced) {
    const auto p = StateParams::with_real_eps(1, 3.0, 0.0, 1.0);
    GridSpec g{-5.0, 5.0, -5.0, 5.0, 101, 50};
    EXPECT_THROW(wigner_grid(p, g), ResolutionTooLow);
    g.ny = min_fringe_nodes(g.y_min, g.y_max, p.alpha);
    EXPECT_NO_THROW(wigner_grid(p, g));
}

TEST(WignerGrid, RejectsDegenerateSpec) {
    EXPECT_THROW(wigner_grid(StateParams{}, GridSpec{1.0, -1.0, -1.0, 1.0, 11, 11}),
                 std::invalid_argument);
}

TEST(XMarginal, CoherentState) {
    const auto p = StateParams::with_real_eps(0, 1.0, 0.0, 0.0);
    for (const auto& pt : x_marginal(wigner_grid(p, default_grid_spec(p)))) {
        const double d = pt.q - std::sqrt(2.0);
        ASSERT_NEAR(pt.density, std::exp(-d * d) / std::sqrt(pi), 1e-10) << pt.q;
    }
}

TEST(XMarginal, MatchesWavefunctionAcrossLattice) {
    for (const auto& p : lattice()) {
        const Wavefunction psi(p);
        const auto marginal = x_marginal(wigner_grid(p, default_grid_spec(p)));
        double worst = 0.0;
        double mass = 0.0;
        for (std::size_t i = 0; i < marginal.size(); ++i) {
            worst = std::max(worst, std::fabs(marginal[i].density - std::norm(psi(marginal[i].q))));
            const double w = (i == 0 || i + 1 == marginal.size()) ? 0.5 : 1.0;
            mass += w * marginal[i].density;
        }
        mass *= marginal[1].q - marginal[0].q;
        EXPECT_LT(worst, 1e-6) << describe(p);
        EXPECT_NEAR(mass, 1.0, 1e-6) << describe(p);
    }
}
