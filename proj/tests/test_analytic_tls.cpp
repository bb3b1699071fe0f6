#include "doctest.h"

#include <cmath>
#include <complex>

#include "ramsey/analytic_tls.hpp"
#include "ramsey/errors.hpp"
#include "ramsey/rng.hpp"

using namespace ramsey;

namespace {

TlsEnsemble random_ensemble(Stream& s, int n_max) {
    TlsEnsemble e;
    const int n = 1 + static_cast<int>(s.next_double() * n_max);
    for (int i = 0; i < n; ++i) {
        const double V = 0.05 + 1.95 * s.next_double();
        const double w01 = std::exp(-6.0 + s.next_double() * (std::log(2.0) + 6.0));
        const double w10 = s.next_double() < 0.5
                               ? w01
                               : std::exp(-6.0 + s.next_double() * (std::log(2.0) + 6.0));
        e.tls.push_back({V, w01, w10});
    }
    return e;
}

} // namespace

TEST_CASE("decay parameter for a symmetric fluctuator") {
    TlsParams t{1.0, 0.5, 0.5};
    auto g = gamma_param(t);
    CHECK(g.real() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(g.imag() == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("single-shot factor reduces to a cosine for a frozen fluctuator") {
    TlsParams t{0.2, 0.0, 0.0};
    auto xi = xi_factor(t, 1.0);
    CHECK(xi.real() == doctest::Approx(std::cos(0.2)).epsilon(1e-14));
    CHECK(xi.imag() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("single-shot factor is a bounded characteristic value") {
    auto s = Stream::root(11).sub(0);
    for (int i = 0; i < 200; ++i) {
        auto e = random_ensemble(s, 1);
        auto xi = xi_factor(e.tls[0], 1.0);
        CHECK(std::abs(xi) <= 1.0 + 1e-12);
    }
}

TEST_CASE("lagged factor decays geometrically in the lag") {
    TlsParams t{0.4, 0.3, 0.7};
    RamseyProtocol p;
    auto x1 = xi_k_factor(t, p, 1);
    auto x2 = xi_k_factor(t, p, 2);
    auto x5 = xi_k_factor(t, p, 5);
    const double step = std::exp(-0.5 * t.W() * p.t_cyc);
    CHECK(std::abs(x2) == doctest::Approx(std::abs(x1) * step).epsilon(1e-13));
    CHECK(std::abs(x5) == doctest::Approx(std::abs(x1) * std::pow(step, 4)).epsilon(1e-12));
}

TEST_CASE("transfer matrix determinant equals the total decay factor") {
    auto s = Stream::root(21).sub(0);
    for (int i = 0; i < 100; ++i) {
        auto e = random_ensemble(s, 1);
        const auto& t = e.tls[0];
        const double dt = 0.1 + 5.0 * s.next_double();
        const double alpha = (s.next_double() - 0.5) * 4.0;
        auto T = transfer_matrix(t, alpha, dt);
        auto det = T.det();
        CHECK(std::abs(det - std::exp(-t.W() * dt)) < 1e-12);
    }
}

TEST_CASE("free-evolution transfer matrix relaxes the population difference") {
    TlsParams t{0.9, 0.4, 1.1};
    const double dt = 2.3;
    auto T = transfer_matrix(t, 0.0, dt);
    const double decay = std::exp(-t.W() * dt);
    const double ratio = t.dW() / t.W();
    CHECK(std::abs(T(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(T(0, 1)) < 1e-12);
    CHECK(std::abs(T(1, 0) - ratio * (1.0 - decay)) < 1e-12);
    CHECK(std::abs(T(1, 1) - decay) < 1e-12);
}

TEST_CASE("conjugating the coupling conjugates the transfer matrix") {
    TlsParams t{0.7, 0.2, 0.9};
    auto Tp = transfer_matrix(t, t.V, 1.7);
    auto Tm = transfer_matrix(t, -t.V, 1.7);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            CHECK(std::abs(Tm(r, c) - std::conj(Tp(r, c))) < 1e-13);
}

TEST_CASE("one-time characteristic function matches the factored form") {
    auto s = Stream::root(33).sub(0);
    for (int i = 0; i < 50; ++i) {
        auto e = random_ensemble(s, 4);
        cplx prod(1.0, 0.0);
        for (const auto& t : e.tls) prod *= xi_factor(t, 1.0);
        auto chi = characteristic_one_time(e, 1.0);
        CHECK(std::abs(chi - prod) < 1e-12);
    }
}

TEST_CASE("two independent two-point routes agree") {
    auto s = Stream::root(55).sub(0);
    RamseyProtocol p;
    const long lags[] = {1, 2, 5, 17, 50};
    for (int i = 0; i < 40; ++i) {
        auto e = random_ensemble(s, 4);
        for (long k : lags) {
            const double a = r2_tls_centered(e, p, k);
            const double b = r2_via_characteristic(e, p, k);
            const double scale = std::max({std::abs(a), std::abs(b), 1.0});
            CHECK(std::abs(a - b) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("two-point function is positive for symmetric fluctuators") {
    RamseyProtocol p;
    TlsEnsemble e = symmetric_ladder(5, 0.2, 0.75, 0.0);
    for (long k = 1; k <= 20; ++k) CHECK(r2_tls_centered(e, p, k) > 0.0);
}

TEST_CASE("subset enumeration guards") {
    RamseyProtocol p;
    TlsEnsemble e = symmetric_ladder(2, 0.2, 0.75, 0.0);
    CHECK_THROWS_AS(r2_tls_centered(e, p, 0), config_error);
    TlsEnsemble big = symmetric_ladder(25, 0.2, 0.75, 0.0);
    CHECK_THROWS_AS(r2_tls_centered(big, p, 1), resource_limit_error);
}

TEST_CASE("pruned subset sum stays close to the full sum") {
    RamseyProtocol p;
    TlsEnsemble e = symmetric_ladder(10, 0.2, 0.75, 0.0);
    for (long k : {1L, 10L, 60L}) {
        const double full = r2_tls_centered(e, p, k, false);
        const double fast = r2_tls_centered(e, p, k, true);
        CHECK(std::abs(full - fast) <= 1e-12 * std::max(std::abs(full), 1e-30));
    }
}

TEST_CASE("weak-coupling closed form approaches the exact result") {
    RamseyProtocol p;
    TlsEnsemble e{{{0.02, 0.5, 0.5}, {0.015, 0.2, 0.2}}};
    CHECK(std::abs(approx_r1(e, p, R1Mode::weak) - r1_tls(e, p)) < 1e-6);
    for (long k : {1L, 3L}) {
        const double exact = r2_tls_centered(e, p, k);
        const double approx = approx_r2(e, p, k, R2Mode::weak);
        CHECK(approx == doctest::Approx(exact).epsilon(1e-2));
    }
}

TEST_CASE("short-evolution closed form approaches the exact result") {
    RamseyProtocol p;
    TlsEnsemble e{{{0.3, 5e-4, 5e-4}, {0.2, 1e-3, 1e-3}}};
    CHECK(std::abs(approx_r1(e, p, R1Mode::short_tr) - r1_tls(e, p)) < 1e-3);
    const double exact = r2_tls_centered(e, p, 1);
    const double approx = approx_r2(e, p, 1, R2Mode::short_tr);
    CHECK(approx == doctest::Approx(exact).epsilon(2e-2));
}

TEST_CASE("strong-coupling closed form approaches the exact result") {
    RamseyProtocol p;
    TlsEnsemble e{{{5.0, 0.005, 0.005}}};
    CHECK(std::abs(approx_r1(e, p, R1Mode::strong) - r1_tls(e, p)) < 2e-3);
}

TEST_CASE("strongly coupled slow fluctuator two-point value") {
    RamseyProtocol p;
    p.phi_R = kPi / 2.0;
    p.t_cyc = 3.0;
    TlsEnsemble e{{{kPi / 2.0, 0.0005, 0.0005}}};
    const double expect = 0.25 * std::exp(-0.003);
    CHECK(approx_r2(e, p, 1, R2Mode::strong_single) ==
          doctest::Approx(expect).epsilon(1e-12));
    TlsEnsemble two = symmetric_ladder(2, 0.2, 0.75, 0.0);
    CHECK_THROWS_AS(approx_r2(two, p, 1, R2Mode::strong_single), config_error);
}
