#include "bhlab/flux.hpp"

#include <doctest.h>

#include <cmath>

using namespace bhlab;

TEST_CASE("phi_f closed forms") {
    const Flux burgers = Flux::burgers();
    CHECK(phi_f(burgers, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(phi_f(burgers, 2.0) == doctest::Approx(2.0).epsilon(1e-15));

    const Flux q = Flux::quadratic(1.7, 0.4, -2.0);
    CHECK(phi_f(q, 0.5) == doctest::Approx(2.0 * 1.7 * 0.5).epsilon(1e-15));

    CHECK_THROWS(phi_f(burgers, 0.0));
    CHECK_THROWS(phi_f(burgers, -1.0));
}

TEST_CASE("phi_f for the power flux matches brute-force minimization") {
    const Flux p = Flux::power(1.5);
    for (double s : {0.25, 1.0, 3.0}) {
        const double closed = p.C_f() * std::pow(s, p.p1());
        // brute force over the shift
        double inf = 1e300;
        for (int i = 0; i <= 20000; ++i) {
            const double a = -10.0 + 20.0 * i / 20000.0;
            inf = std::min(inf, p.df(a + s) - p.df(a));
        }
        CHECK(closed == doctest::Approx(inf).epsilon(1e-4));
        CHECK(inf >= p.C_f() * std::pow(s, p.p1()) - 1e-6);
    }
}

TEST_CASE("phi_f mesh path for custom fluxes obeys the lower-bound contract") {
    const Flux c = Flux::custom([](double u) { return std::cosh(u) - 1.0; },
                                [](double u) { return std::sinh(u); },
                                [](double u) { return std::cosh(u); },
                                [](double u) { return std::sinh(u); },
                                /*C_f=*/1.0, /*p1=*/1.0, /*p2=*/1.0);
    for (double s : {0.1, 0.5, 2.0}) CHECK(phi_f(c, s) >= c.C_f() * s - 1e-9);
}

TEST_CASE("flux validation rejects non-convex and bad exponents") {
    CHECK_THROWS(Flux::quadratic(-1.0));
    CHECK_THROWS(Flux::power(0.5));
    CHECK_THROWS(Flux::custom([](double u) { return u * u * u; },
                              [](double u) { return 3.0 * u * u; },
                              [](double u) { return 6.0 * u; }, [](double) { return 6.0; },
                              1.0, 1.0, 1.0));
}

TEST_CASE("third-derivative growth data") {
    const Flux b = Flux::burgers();
    CHECK(b.has_third_derivative_growth());
    CHECK(b.Gamma() == 0.0);
    CHECK(b.f2_at_0() == doctest::Approx(1.0));

    const Flux cosh_flux = Flux::custom([](double u) { return std::cosh(u) - 1.0; },
                                        [](double u) { return std::sinh(u); },
                                        [](double u) { return std::cosh(u); },
                                        [](double u) { return std::sinh(u); },
                                        1.0, 1.0, 1.0);
    CHECK_FALSE(cosh_flux.has_third_derivative_growth());

    // |f'''| = |sinh| violates any Gamma(1+|u|^p) claim on the test mesh.
    CHECK_THROWS(Flux::custom([](double u) { return std::cosh(u) - 1.0; },
                              [](double u) { return std::sinh(u); },
                              [](double u) { return std::cosh(u); },
                              [](double u) { return std::sinh(u); },
                              1.0, 1.0, 1.0, /*Gamma=*/1.0, /*p=*/0.0));
}

TEST_CASE("decay thresholds") {
    const Flux b = Flux::burgers();
    // Burgers, unit initial L2 mass at t = 1: M_t = 4.
    CHECK(M_t_bound(b, 1.0, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
    // Scaling in t: t -> 4t multiplies by 4^{-1/(p1+2)}.
    CHECK(M_t_bound(b, 4.0, 1.0) ==
          doctest::Approx(4.0 * std::pow(4.0, -1.0 / 3.0)).epsilon(1e-12));
    CHECK(M_t_bound_l1(b, 2.0, 3.0) ==
          doctest::Approx(4.0 * std::pow(3.0 / 2.0, 0.5)).epsilon(1e-12));
    CHECK_THROWS(M_t_bound(b, 0.0, 1.0));
}

TEST_CASE("derived Hoelder constants") {
    const Flux b = Flux::burgers();
    const BoundConstants bc = compute_bound_constants(b, 1.0, 1.0, 1.0, 1.0);
    CHECK(bc.gamma_p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(bc.tilde_gamma_p == doctest::Approx(0.5).epsilon(1e-15));

    // Gamma1 = C_f [2^{1+p1} + 2^{4+2p1} e^{2G}/C_f (1+G+G^2) l2^2]^{gamma_p}
    const double expected1 = std::pow(4.0 + 64.0 * std::exp(2.0) * 3.0, 1.0 / 3.0);
    CHECK(bc.Gamma1 == doctest::Approx(expected1).epsilon(1e-12));

    // Gamma3 at L_K = 1, ||u0||_1 = 1, Burgers: sqrt(2 (1 + 4 e)).
    const double expected3 = std::sqrt(2.0 * (1.0 + 4.0 * std::exp(1.0)));
    CHECK(bc.Gamma3 == doctest::Approx(expected3).epsilon(1e-12));
}

TEST_CASE("lambda_M for quadratic fluxes") {
    const Flux q = Flux::quadratic(2.0, 1.0);
    CHECK(q.lambda_M(3.0) == doctest::Approx(3.0 + 1.0 / 4.0).epsilon(1e-12));
}
