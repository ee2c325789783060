#include "bhlab/splitting.hpp"
#include "bhlab/semigroup.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace bhlab;

namespace {
constexpr double pi = 3.14159265358979323846;

SplittingConfig bh_config(int nu, double T, int n, double /*P*/) {
    SplittingConfig c;
    c.nu = nu;
    c.T = T;
    c.flux = Flux::burgers();
    c.kernel = Kernel::hilbert();
    c.n = n;
    return c;
}

GridFunction gauss(double P, int n) {
    return GridFunction::periodic(P, n, [](double x) { return std::exp(-x * x); });
}
}  // namespace

TEST_CASE("zero kernel splitting equals plain godunov") {
    const double P = 2.0 * pi;
    const int n = 256;
    const GridFunction u0 = gauss(P, n);
    SplittingConfig c = bh_config(4, 0.5, n, P);
    c.kernel = Kernel::zero();
    const SplittingRun run = run_splitting(u0, c);
    const GridFunction direct = godunov_evolve(u0, run.actual_T, c.flux);
    // Same scheme chopped at dyadic times; differences only from the dt
    // sequence restarting at each kick.
    CHECK(norm(run.final_state() - direct, 1) < 4.0 * u0.dx());
    // Source-kick exactness: pre == post for the zero kernel.
    for (size_t i = 0; i < run.times.size(); ++i)
        CHECK(norm(run.post[i] - run.pre[i], norm_inf) == 0.0);
}

TEST_CASE("zero datum is a fixed point") {
    const GridFunction z = GridFunction::periodic(pi, 64);
    const SplittingRun run = run_splitting(z, bh_config(3, 0.5, 64, pi));
    CHECK(norm(run.final_state(), norm_inf) == 0.0);
}

TEST_CASE("source kick exactness at every dyadic time") {
    const double P = 2.0 * pi;
    const int n = 128;
    const GridFunction u0 = gauss(P, n);
    const SplittingConfig c = bh_config(3, 0.5, n, P);
    const SplittingRun run = run_splitting(u0, c);
    const double dt = std::pow(2.0, -c.nu);
    for (size_t l = 1; l < run.times.size(); ++l) {
        const GridFunction expected = run.pre[l] + dt * apply_source(c, run.pre[l]);
        CHECK(norm(run.post[l] - expected, norm_inf) < 1e-14);
    }
}

TEST_CASE("L2 growth bound for Burgers-Hilbert runs") {
    const double P = 2.0 * pi;
    const GridFunction u0 = gauss(P, 512);
    for (int nu : {4, 5, 6}) {
        const SplittingRun run = run_splitting(u0, bh_config(nu, 0.5, 512, P));
        CHECK(l2_growth_check(run) <= 1.0 + 1e-6);
    }
}

TEST_CASE("mass bookkeeping across kicks on periodic domains") {
    const double P = 2.0 * pi;
    const GridFunction u0 = gauss(P, 256);
    const SplittingRun run = run_splitting(u0, bh_config(4, 0.25, 256, P));
    const double m0 = mean(run.post.front());
    for (const auto& g : run.post) CHECK(mean(g) == doctest::Approx(m0).epsilon(1e-10));
}

TEST_CASE("monotone comparison with zero kernel") {
    const double P = 2.0 * pi;
    const int n = 128;
    const GridFunction u0 = gauss(P, n);
    const GridFunction v0 = GridFunction::periodic(P, n, [](double x) {
        return std::exp(-x * x) + 0.2;
    });
    SplittingConfig c = bh_config(3, 0.5, n, P);
    c.kernel = Kernel::zero();
    const SplittingRun ru = run_splitting(u0, c);
    const SplittingRun rv = run_splitting(v0, c);
    for (size_t l = 0; l < ru.times.size(); ++l)
        for (int i = 0; i < n; ++i) CHECK(ru.post[l][i] <= rv.post[l][i] + 1e-12);
}

TEST_CASE("determinism: identical config gives identical trajectories") {
    const double P = 2.0 * pi;
    const GridFunction u0 = gauss(P, 128);
    const SplittingConfig c = bh_config(4, 0.25, 128, P);
    const SplittingRun a = run_splitting(u0, c);
    const SplittingRun b = run_splitting(u0, c);
    REQUIRE(a.times.size() == b.times.size());
    for (size_t l = 0; l < a.times.size(); ++l)
        CHECK(norm(a.post[l] - b.post[l], norm_inf) == 0.0);
}

TEST_CASE("self convergence: zero kernel collapses, Burgers-Hilbert decays geometrically") {
    const double P = 2.0 * pi;
    const int n = 256;
    const GridFunction u0 = gauss(P, n);
    SplittingConfig c = bh_config(4, 0.5, n, P);
    c.kernel = Kernel::zero();
    const auto z = self_convergence(u0, c, {4, 5, 6}, 4.0);
    for (const auto& r : z) CHECK(r.l1_difference < 2.0 * u0.dx());

    c.kernel = Kernel::hilbert();
    const auto rows = self_convergence(u0, c, {4, 5, 6, 7, 8}, 4.0);
    for (size_t i = 0; i + 1 < rows.size(); ++i) {
        CHECK(rows[i + 1].l1_difference < rows[i].l1_difference);
        CHECK(rows[i + 1].l1_difference / rows[i].l1_difference <= 0.8);
    }
}

TEST_CASE("entropy residual: constants vanish, smooth runs are small, shocks produce entropy") {
    const double P = 2.0 * pi;
    const int n = 256;
    EntropyTestFamily fam;
    fam.t_centers = {0.25};
    fam.x_centers = {0.0};
    fam.t_widths = {0.1};
    fam.x_widths = {0.2 * 2.0 * P};

    {  // constant solution, k equal to the constant
        const GridFunction c0 = GridFunction::periodic(P, n, [](double) { return 0.7; });
        SplittingConfig c = bh_config(4, 0.5, n, P);
        c.kernel = Kernel::zero();
        const SplittingRun run = run_splitting(c0, c);
        const double r = entropy_residual(run, {0.7}, fam);
        CHECK(std::abs(r) < 1e-12);
    }
    {  // smooth pre-breaking solution: residual within quadrature error
        const GridFunction u0 = GridFunction::periodic(P, n, [](double x) {
            return 0.3 * std::sin(pi * x / (2.0 * pi));
        });
        SplittingConfig c = bh_config(5, 0.5, n, P);
        c.kernel = Kernel::zero();
        const SplittingRun run = run_splitting(u0, c);
        const double r = entropy_residual(run, {-0.5, 0.0, 0.5}, fam);
        CHECK(r >= -0.5 * (u0.dx() + std::pow(2.0, -5)));
    }
    {  // stationary shock at 0: strict entropy production for k = 0
        const GridFunction v0 = GridFunction::periodic(P, n, [](double x) {
            return x < 0.0 ? 1.0 : -1.0;
        });
        SplittingConfig c = bh_config(5, 0.5, n, P);
        c.kernel = Kernel::zero();
        const SplittingRun run = run_splitting(v0, c);
        EntropyTestFamily shock_fam;
        shock_fam.t_centers = {0.25};
        shock_fam.x_centers = {0.0};
        shock_fam.t_widths = {0.2};
        shock_fam.x_widths = {1.0};
        const double r = entropy_residual(run, {0.0}, shock_fam);
        CHECK(r > 0.01);
    }
}

TEST_CASE("entropy residual rejects test functions leaving the time strip") {
    const double P = pi;
    const GridFunction u0 = gauss(P, 64);
    const SplittingRun run = run_splitting(u0, bh_config(3, 0.5, 64, P));
    EntropyTestFamily fam;
    fam.t_centers = {0.05};
    fam.x_centers = {0.0};
    fam.t_widths = {0.2};  // support would reach t < 0
    fam.x_widths = {1.0};
    CHECK_THROWS(entropy_residual(run, {0.0}, fam));
}

TEST_CASE("L1 decay check needs an integrable kernel") {
    const double P = 2.0 * pi;
    const GridFunction u0 = gauss(P, 128);
    const SplittingRun run = run_splitting(u0, bh_config(3, 0.25, 128, P));
    CHECK_THROWS(l1_decay_check(run));
}

TEST_CASE("l1 kernel run: decay and fractional TV bound") {
    const int n = 512;
    GridFunction u0 = GridFunction::line(8.0, n, [](double x) {
        const double r = 1.0 - x * x;
        return r > 0.0 ? std::exp(1.0 - 1.0 / r) : 0.0;
    });
    u0 = (1.0 / norm(u0, 1)) * u0;
    SplittingConfig c;
    c.nu = 4;
    c.T = 1.0;
    c.flux = Flux::burgers();
    c.kernel = Kernel::l1_singular();
    c.n = n;
    const SplittingRun run = run_splitting(u0, c);
    CHECK(l1_decay_check(run) <= 1.0 + 10.0 * u0.dx());

    const double M_fit = fit_tv_halfp1_constant(run, run.actual_T, -1.0, 1.0);
    const auto tv = tv_halfp1_bound_check(run, run.actual_T, -1.0, 1.0, 1.25 * M_fit + 1e-12);
    CHECK(tv.measured <= tv.bound);
}

TEST_CASE("trajectory export writes snapshots and diagnostics") {
    const double P = pi;
    const GridFunction u0 = gauss(P, 64);
    const SplittingRun run = run_splitting(u0, bh_config(2, 0.5, 64, P));
    const std::string dir = "test_export_tmp";
    run.export_to(dir);
    CHECK(std::filesystem::exists(dir + "/diagnostics.csv"));
    CHECK(std::filesystem::exists(dir + "/post_0000.dat"));
    const GridFunction back = GridFunction::read_file(dir + "/post_0000.dat");
    CHECK(norm(back - run.post.front(), norm_inf) < 1e-15);
    std::filesystem::remove_all(dir);
}
