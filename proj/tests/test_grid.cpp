#include "bhlab/grid.hpp"
#include "bhlab/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace bhlab;

namespace {
constexpr double pi = 3.14159265358979323846;

GridFunction random_steps(int n, double half, unsigned long long stream) {
    CounterRng rng(7, stream);
    std::vector<double> v(n, 0.0);
    int i = 0;
    while (i < n) {
        const int len = rng.uniform_int(n / 20, n / 6);
        const double val = rng.uniform(-1.0, 1.0);
        for (int j = i; j < std::min(n, i + len); ++j) v[j] = val;
        i += len;
    }
    return GridFunction::like(GridFunction::line(half, n), v);
}
}  // namespace

TEST_CASE("norms: zero function and indicator block") {
    const GridFunction z = GridFunction::periodic(pi, 64);
    CHECK(norm(z, 1) == 0.0);
    CHECK(norm(z, 2) == 0.0);
    CHECK(norm(z, 6) == 0.0);
    CHECK(norm(z, norm_inf) == 0.0);

    // Indicator of a width-w block: L1 norm equals the width.
    const int n = 256;
    const GridFunction g = GridFunction::periodic(
        1.0, n, [](double x) { return (x >= -0.25 && x < 0.25) ? 1.0 : 0.0; });
    CHECK(norm(g, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("norms: sin on [0, 2pi) has L2 norm sqrt(pi)") {
    const GridFunction g = GridFunction::periodic(pi, 1024, [](double x) { return std::sin(x); });
    CHECK(norm(g, 2) == doctest::Approx(std::sqrt(pi)).epsilon(1e-6));
}

TEST_CASE("norm rejects p outside {1,2,6,inf}") {
    const GridFunction g = GridFunction::periodic(pi, 16);
    CHECK_THROWS(norm(g, 3.0));
    CHECK_THROWS(norm(g, 4.0));
}

TEST_CASE("L2 additivity for disjointly supported parts") {
    const int n = 512;
    const GridFunction a = GridFunction::line(
        4.0, n, [](double x) { return x < 0.0 ? std::exp(-1.0 / (0.5 + x) / (0.5 + x)) * (x > -0.5) : 0.0; });
    const GridFunction b = GridFunction::line(
        4.0, n, [](double x) { return x > 1.0 && x < 2.0 ? 0.7 : 0.0; });
    const double s = norm(a + b, 2);
    CHECK(s * s == doctest::Approx(norm(a, 2) * norm(a, 2) + norm(b, 2) * norm(b, 2))
                       .epsilon(1e-12));
}

TEST_CASE("derivatives: constants, trig, linear") {
    const GridFunction c = GridFunction::periodic(pi, 128, [](double) { return 3.5; });
    CHECK(norm(derivative(c, 1, DerivMethod::spectral), norm_inf) < 1e-12);
    CHECK(norm(derivative(c, 2, DerivMethod::central_difference), norm_inf) < 1e-10);

    const GridFunction s = GridFunction::periodic(pi, 256, [](double x) { return std::sin(x); });
    const GridFunction ds = derivative(s, 1, DerivMethod::spectral);
    double worst = 0.0;
    for (int i = 0; i < s.n(); ++i)
        worst = std::max(worst, std::abs(ds[i] - std::cos(s.x(i))));
    CHECK(worst < 1e-10);

    const GridFunction lin = GridFunction::line(2.0, 128, [](double x) { return x; });
    const GridFunction dlin = derivative(lin, 1, DerivMethod::central_difference);
    for (int i = 1; i + 1 < lin.n(); ++i) CHECK(dlin[i] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectral derivative of a resolved trig polynomial is exact to 1e-10") {
    const GridFunction g = GridFunction::periodic(pi, 128, [](double x) {
        return 0.3 * std::sin(3.0 * x) - 1.2 * std::cos(7.0 * x) + std::sin(x);
    });
    const GridFunction d1 = derivative(g, 1, DerivMethod::spectral);
    const GridFunction d2 = derivative(g, 2, DerivMethod::spectral);
    double w1 = 0.0, w2 = 0.0;
    for (int i = 0; i < g.n(); ++i) {
        const double x = g.x(i);
        w1 = std::max(w1, std::abs(d1[i] - (0.9 * std::cos(3.0 * x) + 8.4 * std::sin(7.0 * x) +
                                            std::cos(x))));
        w2 = std::max(w2, std::abs(d2[i] - (-2.7 * std::sin(3.0 * x) +
                                            58.8 * std::cos(7.0 * x) - std::sin(x))));
    }
    CHECK(w1 < 1e-10);
    CHECK(w2 < 1e-9);
}

TEST_CASE("spectral derivative requires a periodic domain") {
    const GridFunction g = GridFunction::line(1.0, 32);
    CHECK_THROWS(derivative(g, 1, DerivMethod::spectral));
}

TEST_CASE("fractional_tv: single step, ramp, alternating jumps") {
    const int n = 16;
    const GridFunction step = GridFunction::line(
        1.0, n, [](double x) { return x > 0.0 ? 1.0 : 0.0; });
    for (double gamma : {1.0, 0.5, 0.25})
        CHECK(fractional_tv(step, gamma, -1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

    // Monotone ramp 0 -> 1 across the sampled window: the coarsest
    // partition dominates when 1/gamma > 1.
    const double xa = -1.0 + 1.0 / n, xb = 1.0 - 1.0 / n;  // first/last cell centers
    const GridFunction ramp = GridFunction::line(
        1.0, n, [xa, xb](double x) { return (x - xa) / (xb - xa); });
    CHECK(fractional_tv(ramp, 0.5, -1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fractional_tv(ramp, 0.5, -1.0, 1.0) ==
          doctest::Approx(fractional_tv_bruteforce(ramp, 0.5, -1.0, 1.0)).epsilon(1e-12));

    // N alternating jumps of height h at gamma = 1/2 give N h^2.
    const double h = 0.7;
    const GridFunction alt = GridFunction::line(
        1.0, 12, [h](double x) {
            const int cell = static_cast<int>(std::floor((x + 1.0) * 6.0));
            return (cell % 2 == 0) ? 0.0 : h;
        });
    const double dp = fractional_tv(alt, 0.5, -1.0, 1.0);
    const double bf = fractional_tv_bruteforce(alt, 0.5, -1.0, 1.0);
    CHECK(dp == doctest::Approx(bf).epsilon(1e-12));
    CHECK(dp == doctest::Approx(11 * h * h).epsilon(1e-12));
}

TEST_CASE("fractional_tv equals DP on random data (brute-force oracle)") {
    for (unsigned long long s = 0; s < 30; ++s) {
        CounterRng rng(11, s);
        const int n = 8 + rng.uniform_int(0, 8);
        std::vector<double> v(n);
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
        const GridFunction g = GridFunction::like(GridFunction::line(1.0, n), v);
        const double gamma = 0.2 + 0.8 * rng.uniform();
        CHECK(fractional_tv(g, gamma, -1.0, 1.0) ==
              doctest::Approx(fractional_tv_bruteforce(g, gamma, -1.0, 1.0)).epsilon(1e-10));
    }
}

TEST_CASE("fractional_tv properties: gamma=1 is classical TV, shift/reflection invariance, endpoint lower bound") {
    for (unsigned long long s = 0; s < 10; ++s) {
        CounterRng rng(13, s);
        const int n = 64;
        std::vector<double> v(n);
        for (double& x : v) x = rng.uniform(-2.0, 2.0);
        const GridFunction g = GridFunction::like(GridFunction::line(1.0, n), v);

        double tv = 0.0;
        for (int i = 1; i < n; ++i) tv += std::abs(v[i] - v[i - 1]);
        CHECK(fractional_tv(g, 1.0, -1.0, 1.0) == doctest::Approx(tv).epsilon(1e-12));

        std::vector<double> shifted(v), reflected(v.rbegin(), v.rend());
        for (double& x : shifted) x += 5.0;
        const GridFunction gs = GridFunction::like(g, shifted);
        const GridFunction gr = GridFunction::like(g, reflected);
        const double gamma = 0.5;
        const double base = fractional_tv(g, gamma, -1.0, 1.0);
        CHECK(fractional_tv(gs, gamma, -1.0, 1.0) == doctest::Approx(base).epsilon(1e-12));
        CHECK(fractional_tv(gr, gamma, -1.0, 1.0) == doctest::Approx(base).epsilon(1e-12));
        CHECK(base >= std::pow(std::abs(v[n - 1] - v[0]), 2.0) - 1e-12);
    }
}

TEST_CASE("fractional_tv domain and argument validation") {
    const GridFunction g = GridFunction::line(1.0, 16);
    CHECK_THROWS(fractional_tv(g, 0.5, -2.0, 1.0));
    CHECK_THROWS(fractional_tv(g, 0.0, -1.0, 1.0));
    CHECK_THROWS(fractional_tv(g, 1.5, -1.0, 1.0));
}

TEST_CASE("serialization round trip") {
    const GridFunction g = random_steps(64, 2.0, 3);
    std::stringstream ss;
    g.write(ss);
    const GridFunction h = GridFunction::read(ss);
    REQUIRE(h.n() == g.n());
    CHECK(h.domain() == g.domain());
    CHECK(h.dx() == doctest::Approx(g.dx()).epsilon(1e-15));
    for (int i = 0; i < g.n(); ++i) CHECK(h[i] == g[i]);
}

TEST_CASE("grid invariants enforced") {
    CHECK_THROWS(GridFunction::periodic(1.0, 3));
    CHECK_THROWS(GridFunction::periodic(-1.0, 16));
    CHECK_THROWS(GridFunction::periodic(1.0, 16, [](double) { return std::nan(""); }));
}
