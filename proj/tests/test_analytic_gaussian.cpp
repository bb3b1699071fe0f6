#include "doctest.h"

#include <cmath>
#include <vector>

#include "ramsey/analytic_gaussian.hpp"
#include "ramsey/errors.hpp"
#include "ramsey/protocol.hpp"

using namespace ramsey;

namespace {
const RamseyProtocol kDefault{};
}

TEST_CASE("white noise correlators vanish beyond lag zero") {
    GaussianNoiseSpec spec = White{2.5};
    CHECK(phase_correlator(spec, kDefault, 0) == doctest::Approx(2.5));
    for (long k = 1; k <= 5; ++k)
        CHECK(phase_correlator(spec, kDefault, k) == 0.0);
}

TEST_CASE("exponentially correlated working point") {
    GaussianNoiseSpec spec = ExpCorrelated{6.51, 20.0};
    CHECK(phase_correlator(spec, kDefault, 0) ==
          doctest::Approx(0.1601).epsilon(1e-3));
    CHECK(phase_correlator(spec, kDefault, 1) ==
          doctest::Approx(0.1401).epsilon(1e-3));
}

TEST_CASE("lorentzian spectrum quadrature reproduces the closed form") {
    ExpCorrelated ec{6.51, 20.0};
    GaussianNoiseSpec spec = ec;
    auto S = [&spec](double w) { return spectral_density(spec, w); };
    for (long k = 0; k <= 10; ++k) {
        CAPTURE(k);
        const double closed = phase_correlator(spec, kDefault, k);
        const double quad =
            phase_correlator_quadrature(S, kDefault, k, {1e-8, 0.0});
        CHECK(std::abs(quad - closed) <= 1e-8 * std::abs(closed));
    }
}

TEST_CASE("zero spectrum integrates to zero") {
    auto S = [](double) { return 0.0; };
    CHECK(phase_correlator_quadrature(S, kDefault, 0) == 0.0);
    CHECK(phase_correlator_quadrature(S, kDefault, 3) == 0.0);
}

TEST_CASE("colored closed form gated by its validity window") {
    GaussianNoiseSpec bad = Colored{1.0, 1.0, 0.1};
    CHECK_THROWS_AS(phase_correlator(bad, kDefault, 0), config_error);
    GaussianNoiseSpec waived = Colored{1.0, 1.0, 0.1, true};
    CHECK_NOTHROW(phase_correlator(waived, kDefault, 0));
}

TEST_CASE("colored correlators oscillate with the predicted period") {
    GaussianNoiseSpec spec = Colored{1e-4, 0.2, 0.02};
    const double f0 = phase_correlator(spec, kDefault, 0);
    CHECK(f0 > 0.0);
    CHECK(phase_correlator(spec, kDefault, 2) > 0.0);
    CHECK(phase_correlator(spec, kDefault, 3) < 0.0);
    for (long k = 1; k <= 40; ++k)
        CHECK(std::abs(phase_correlator(spec, kDefault, k)) <= f0);
}

TEST_CASE("colored closed form tracks quadrature inside the window") {
    Colored c{1e-4, 0.2, 0.02};
    GaussianNoiseSpec spec = c;
    auto S = [&spec](double w) { return spectral_density(spec, w); };
    for (long k : {0L, 1L, 2L, 5L}) {
        CAPTURE(k);
        const double closed = phase_correlator(spec, kDefault, k);
        const double quad =
            phase_correlator_quadrature(S, kDefault, k, {1e-8, 0.0});
        CHECK(std::abs(quad - closed) <=
              0.05 * std::max(std::abs(closed), std::abs(quad)));
    }
}

TEST_CASE("soft-cutoff 1/f closed forms match the rate-representation "
          "integral") {
    for (double D : {0.02574, 0.04087}) {
        for (double b : {1e-5, 1e-3}) {
            OneOverF spec{D, b};
            GaussianNoiseSpec gs = spec;
            for (long k : {0L, 1L, 2L, 5L, 10L, 100L, 1000L}) {
                CAPTURE(D);
                CAPTURE(b);
                CAPTURE(k);
                const double closed = phase_correlator(gs, kDefault, k);
                const double quad =
                    one_over_f_correlator_quadrature(spec, kDefault, k);
                CHECK(std::abs(closed - quad) <= 1e-8 * std::abs(quad));
            }
        }
    }
}

TEST_CASE("soft-cutoff 1/f study point") {
    GaussianNoiseSpec spec = OneOverF{0.02574, 1e-5};
    CHECK(std::abs(phase_correlator(spec, kDefault, 0) - 0.16) <= 0.005);
}

TEST_CASE("1/f spectral quadrature agrees with the closed form") {
    OneOverF of{0.02574, 1e-5};
    GaussianNoiseSpec spec = of;
    auto S = [&spec](double w) { return spectral_density(spec, w); };
    for (long k : {0L, 1L, 5L, 10L}) {
        CAPTURE(k);
        const double closed = phase_correlator(spec, kDefault, k);
        const double quad =
            phase_correlator_quadrature(S, kDefault, k, {1e-8, 0.0});
        CHECK(std::abs(quad - closed) <= 1e-8 * std::abs(closed));
    }
}

TEST_CASE("logarithmic approximation window") {
    OneOverF spec{0.04, 1e-3};
    GaussianNoiseSpec gs = spec;
    for (long k : {1L, 10L, 33L}) {
        CAPTURE(k);
        const double exact = phase_correlator(gs, kDefault, k);
        const double approx = log_approx_f_k(spec, kDefault, k);
        CHECK(std::abs(approx - exact) <= 0.10 * std::abs(exact));
    }
    const long k_late = 334; // k omega_min t_cyc > 1
    const double exact = phase_correlator(gs, kDefault, k_late);
    const double approx = log_approx_f_k(spec, kDefault, k_late);
    CHECK(std::abs(approx - exact) > 0.10 * std::abs(exact));
}

TEST_CASE("logarithmic approximation differencing and zero crossing") {
    OneOverF spec{0.04, 1e-3};
    const double d =
        log_approx_f_k(spec, kDefault, 50) - log_approx_f_k(spec, kDefault, 100);
    CHECK(d == doctest::Approx(0.5 * 0.04 * std::log(2.0)).epsilon(1e-12));
    CHECK(log_approx_f_k(spec, kDefault, 187) > 0.0);
    CHECK(log_approx_f_k(spec, kDefault, 188) < 0.0);
}

TEST_CASE("1/f large-lag asymptote") {
    OneOverF spec{0.03, 1e-3};
    GaussianNoiseSpec gs = spec;
    const long k10 = 3334; // k omega_min t_cyc ~ 10
    const double exact = phase_correlator(gs, kDefault, k10);
    const double asym = one_over_f_large_k_asymptote(spec, kDefault, k10);
    CHECK(std::abs(asym - exact) < 0.10 * std::abs(exact));
}

TEST_CASE("f0 dominates every lag") {
    GaussianNoiseSpec specs[] = {GaussianNoiseSpec{ExpCorrelated{6.51, 20.0}},
                                 GaussianNoiseSpec{OneOverF{0.02574, 1e-5}},
                                 GaussianNoiseSpec{White{1.0}}};
    for (const auto& s : specs) {
        const double f0 = phase_correlator(s, kDefault, 0);
        for (long k = 1; k <= 60; ++k) {
            CAPTURE(spec_name(s));
            CAPTURE(k);
            CHECK(f0 >= std::abs(phase_correlator(s, kDefault, k)));
        }
    }
}

TEST_CASE("tabulated spectra integrate like their analytic source") {
    ExpCorrelated ec{6.51, 20.0};
    GaussianNoiseSpec source = ec;
    Tabulated tab;
    for (double w = 0.0; w <= 20.0; w += 0.002) {
        tab.omega.push_back(w);
        tab.S.push_back(spectral_density(source, w));
    }
    GaussianNoiseSpec spec = tab;
    for (long k : {0L, 1L, 3L}) {
        CAPTURE(k);
        const double approx = phase_correlator(spec, kDefault, k);
        const double closed = phase_correlator(source, kDefault, k);
        CHECK(approx == doctest::Approx(closed).epsilon(1e-2));
    }
}

TEST_CASE("single-point functions of the accumulated phase") {
    CHECK(r1_gauss(0.16, kDefault) == doctest::Approx(0.826386).epsilon(1e-5));
    CHECK(r1_gauss(0.0, kDefault) ==
          doctest::Approx(ramsey_probability(0.0, kDefault)).epsilon(1e-15));
    CHECK(r1_gauss(1e6, kDefault) == doctest::Approx(0.5));
    CHECK_THROWS_AS(r1_gauss(-0.1, kDefault), config_error);
}

TEST_CASE("two-point function of the accumulated phase") {
    CHECK(r2_gauss_centered(0.16, 0.0, kDefault) == 0.0);
    CHECK(r2_gauss_centered(0.16, 0.1401, kDefault) ==
          doctest::Approx(0.01602).epsilon(1e-3));
    const double fk = 1e-4;
    const double weak = 0.25 * std::exp(-0.16) * fk * std::sin(kDefault.phi_R) *
                        std::sin(kDefault.phi_R);
    CHECK(r2_gauss_centered(0.16, fk, kDefault) / weak ==
          doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("three-point function of the accumulated phase") {
    CHECK(r3_gauss_centered(0.2, 0.0, 0.0, 0.0, kDefault) == 0.0);

    RamseyProtocol quarter = kDefault;
    quarter.phi_R = kPi / 2.0;
    CHECK(std::abs(r3_gauss_centered(0.2, 0.05, 0.04, 0.03, quarter)) < 1e-15);

    const double f0 = 0.16, fk = 0.01, fl = 0.008, flk = 0.009;
    const double got = r3_gauss_centered(f0, fk, fl, flk, kDefault);
    const double weak = -0.125 * std::exp(-1.5 * f0) *
                        (fk * fl + fk * flk + fl * flk) *
                        std::cos(kDefault.phi_R) * std::sin(kDefault.phi_R) *
                        std::sin(kDefault.phi_R);
    CHECK(got < 0.0);
    CHECK(got == doctest::Approx(weak).epsilon(0.05));
}

TEST_CASE("correlator inference round-trips through the forward maps") {
    const double f0 = 0.7;
    const std::vector<double> fks{0.3, -0.2, 0.05, 1e-3};
    for (double phi : {kPi / 4.0, kPi / 3.0, kPi / 6.0}) {
        CAPTURE(phi);
        RamseyProtocol p = kDefault;
        p.phi_R = phi;
        const double r1 = r1_gauss(f0, p);
        std::vector<double> r2;
        for (double fk : fks) r2.push_back(r2_gauss_centered(f0, fk, p));
        auto inf = infer_f_from_measurements(r1, r2, p);
        REQUIRE(inf.f.size() == fks.size() + 1);
        CHECK(std::abs(inf.f[0] - f0) <= 1e-10);
        for (std::size_t i = 0; i < fks.size(); ++i)
            CHECK(std::abs(inf.f[i + 1] - fks[i]) <= 1e-10);
    }
}

TEST_CASE("inference edge cases") {
    const double r1_clean = ramsey_probability(0.0, kDefault);
    auto inf = infer_f_from_measurements(r1_clean, {}, kDefault);
    CHECK(std::abs(inf.f[0]) <= 1e-12);
    CHECK_THROWS_AS(infer_f_from_measurements(0.4, {}, kDefault),
                    numerical_error);
    CHECK_THROWS_AS(infer_f_from_measurements(0.99, {}, kDefault),
                    numerical_error);
}

TEST_CASE("gaussianity score scales the residual") {
    PhaseCorrelators f{{0.16, 0.14, 0.12, 0.1}};
    const double pred = r3_gauss_centered(f, kDefault, 1, 2);
    CHECK(gaussianity_score(pred, 0.5, f, kDefault, 1, 2) ==
          doctest::Approx(0.0));
    CHECK(gaussianity_score(pred + 1.0, 0.5, f, kDefault, 1, 2) ==
          doctest::Approx(2.0));
    CHECK_THROWS_AS(gaussianity_score(0.0, 0.0, f, kDefault, 1, 2),
                    config_error);
}

TEST_CASE("phase correlator container guards") {
    PhaseCorrelators bad{{0.0, 0.1}};
    CHECK_THROWS_AS(bad.validate(), config_error);
    PhaseCorrelators worse{{0.1, 0.2}};
    CHECK_THROWS_AS(worse.validate(), config_error);
    PhaseCorrelators ok{{0.2, 0.1, -0.05}};
    CHECK_NOTHROW(ok.validate());
    CHECK_THROWS_AS(ok.at(3), config_error);
    CHECK_THROWS_AS(ok.at(-1), config_error);
}

TEST_CASE("ensemble spectrum closed form") {
    TlsEnsemble single{{{0.5, 0.15, 0.15}}};
    const double W = 0.3;
    CHECK(tls_spectrum_theory(single, 0.0) ==
          doctest::Approx(2.0 * 0.25 / W).epsilon(1e-12));
    const double far = tls_spectrum_theory(single, 100.0 * W);
    CHECK(far * (100.0 * W) * (100.0 * W) / (2.0 * 0.25 * W) ==
          doctest::Approx(1.0).epsilon(2e-4));
    CHECK(tls_spectrum_theory(single, 0.7) ==
          doctest::Approx(tls_spectrum_theory(single, -0.7)).epsilon(1e-15));
}

TEST_CASE("rate ladder produces a decade-spanning 1/f region") {
    auto e = symmetric_ladder(10, 0.2, 0.75, 0.0);
    const double lo = 1e-3, hi = 1e-1;
    const double slope = std::log(tls_spectrum_theory(e, hi) /
                                  tls_spectrum_theory(e, lo)) /
                         std::log(hi / lo);
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.25));
}
