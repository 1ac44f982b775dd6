#include "oracles.hpp"

#include "ptring/spectral.hpp"
#include "ptring/steady.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace ptring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using oracle::GHz;
using oracle::MHz;

namespace
{

SystemConfig balanced(double gamma, double B, double epsilon = 1 * MHz)
{
    SystemConfig c;
    c.resonators.omega_c = 0.0;
    c.resonators.C1 = 300 * MHz;
    c.resonators.C2 = 1 * MHz;
    c.resonators.gamma1 = c.resonators.gamma2 = gamma;
    c.gain.A = 301 * MHz;
    c.gain.B = B;
    c.kappa = 0.5 * MHz;
    c.drive.epsilon = epsilon;
    return c;
}

} // namespace

TEST_CASE("evolution matrix eigenvalues are the eigenfrequencies")
{
    SystemConfig c = balanced(1.15 * MHz, 0.05);
    c.resonators.omega_c = 3 * MHz;
    c.drive.omega_l = 3.4 * MHz;
    const double I1 = 2e8;
    const Eigen::Matrix2cd M = evolution_matrix(c, I1, c.drive.omega_l);
    const Eigen::Vector2cd ev = M.eigenvalues();
    const auto s = eigenfrequencies(c, I1);
    const double D = c.drive.omega_l - c.resonators.omega_c;
    // M acts in the drive frame, so its eigenvalues are omega - omega_l.
    const Complex a = ev(0) + c.drive.omega_l, b = ev(1) + c.drive.omega_l;
    const double tol = 1e-9 * MHz;
    const bool direct = std::abs(a - s.omega_plus) < tol && std::abs(b - s.omega_minus) < tol;
    const bool swapped = std::abs(b - s.omega_plus) < tol && std::abs(a - s.omega_minus) < tol;
    CHECK((direct || swapped));
    CHECK_THAT(M(0, 0).real(), WithinRel(-D, 1e-15));
}

TEST_CASE("closed-form eigenfrequencies against a numerical eigensolver")
{
    oracle::RandomConfigs gen(23);
    for (int k = 0; k < 2000; ++k) {
        SystemConfig c = gen.linear();
        c.resonators.omega_c = 0.0;
        c.gain.B = gen.log_uniform(1e-3, 1.0);
        const double I1 = gen.log_uniform(1.0, 1e7);
        const auto s = eigenfrequencies(c, I1);
        const auto [p, m] = oracle::eigen_shifts(c, I1);
        const double scale = std::max({std::abs(p), std::abs(m), c.kappa});
        CHECK(std::abs(s.omega_plus - p) <= 1e-10 * scale);
        CHECK(std::abs(s.omega_minus - m) <= 1e-10 * scale);
    }
}

TEST_CASE("linear exceptional point at half the passive loss")
{
    const auto r = find_ep(balanced(1.15 * MHz, 0.0), Port::One, EpMode::Linear);
    CHECK(r.found);
    CHECK_THAT(r.kappa_ep, WithinRel(0.5 * MHz, 1e-9));
}

TEST_CASE("phase classification around the linear exceptional point")
{
    SystemConfig c = balanced(1.15 * MHz, 0.0);
    c.kappa = 0.4 * MHz;
    CHECK(eigenfrequencies(c, 0.0).phase == PtPhase::Broken);
    c.kappa = 0.6 * MHz;
    CHECK(eigenfrequencies(c, 0.0).phase == PtPhase::Unbroken);
    // The EP sits where 4 kappa^2 = (G1 + Gamma2)^2 / 4.
    const auto d = derive(c, 0.0);
    c.kappa = std::abs(d.G1 + d.Gamma2) / 4;
    const auto s = eigenfrequencies(c, 0.0);
    CHECK(s.at_ep);
    CHECK(s.phase == PtPhase::EP);
    CHECK_THAT(std::abs(s.omega_plus - s.omega_minus), WithinAbs(0.0, 1e-3 * MHz));
}

TEST_CASE("imaginary parts converge to minus half the waveguide coupling")
{
    const double gamma = 1.15 * MHz;
    SystemConfig c = balanced(gamma, 0.0);
    for (double kappa = 0.51 * MHz; kappa < 20 * MHz; kappa *= 1.3) {
        c.kappa = kappa;
        const auto s = eigenfrequencies(c, 0.0);
        CHECK_THAT(s.omega_plus.imag(), WithinRel(-gamma / 2, 1e-12));
        CHECK_THAT(s.omega_minus.imag(), WithinRel(-gamma / 2, 1e-12));
        CHECK_THAT(s.omega_plus.real(), WithinRel(-s.omega_minus.real(), 1e-12));
    }
    // Without waveguide losses the plateau is at zero.
    c = balanced(0.0, 0.0);
    c.kappa = 3 * MHz;
    const auto s = eigenfrequencies(c, 0.0);
    CHECK_THAT(s.omega_plus.imag(), WithinAbs(0.0, 1e-9));
}

TEST_CASE("self-consistent exceptional point shifts with the drive")
{
    const auto weak = find_ep(balanced(1.15 * MHz, 0.05, 1 * MHz), Port::One, EpMode::SelfConsistent);
    const auto mid = find_ep(balanced(1.15 * MHz, 0.05, 2 * GHz), Port::One, EpMode::SelfConsistent);
    const auto strong = find_ep(balanced(1.15 * MHz, 0.05, 25 * GHz), Port::One, EpMode::SelfConsistent);
    REQUIRE(weak.found);
    REQUIRE(mid.found);
    REQUIRE(strong.found);
    CHECK_THAT(weak.kappa_ep, WithinRel(0.5 * MHz, 1e-3));
    CHECK(mid.kappa_ep < 0.5 * MHz);
    CHECK(strong.kappa_ep > 0.5 * MHz);
    // At the crossing the discriminant with the self-consistent intensity vanishes.
    SystemConfig c = balanced(1.15 * MHz, 0.05, 2 * GHz);
    c.kappa = mid.kappa_ep;
    const auto s = eigenfrequencies(c, mid.I1_at_ep);
    CHECK(std::abs(s.discriminant) < 1e-6 * 4 * c.kappa * c.kappa);
    CHECK_THAT(steady_state(c, 0.0, Port::One).I1, WithinRel(mid.I1_at_ep, 1e-9));
}

TEST_CASE("balance classification")
{
    SystemConfig c = balanced(1.15 * MHz, 0.05);
    auto p = classify_pt(c, 0.0);
    CHECK(p.balanced_linear);
    CHECK(p.balanced_full);
    CHECK(p.category == PtBalance::BalancedFull);
    p = classify_pt(c, 1e8);
    CHECK(p.balanced_linear);
    CHECK(!p.balanced_full);
    CHECK(p.category == PtBalance::BalancedLinear);
    c.gain.A = 301 * MHz + 0.05 * 1e8;
    p = classify_pt(c, 1e8);
    CHECK(p.category == PtBalance::BalancedFull);
    CHECK(!p.balanced_linear);
    c.gain.A = 250 * MHz;
    CHECK(classify_pt(c, 0.0).category == PtBalance::Unbalanced);
}
