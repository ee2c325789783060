#include "bhlab/wavebreak.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace bhlab;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_CASE("m_of_t: constants, -sin, quadratic scaling") {
    const Flux b = Flux::burgers();
    const GridFunction c = GridFunction::periodic(pi, 128, [](double) { return 0.3; });
    CHECK(m_of_t(c, b) == 0.0);

    const GridFunction s = GridFunction::periodic(pi, 512, [](double x) { return -std::sin(x); });
    CHECK(m_of_t(s, b) == doctest::Approx(1.0).epsilon(1e-10));

    // Quadratic flux: m = 2a |inf u_x|.
    const Flux q = Flux::quadratic(1.5);
    CHECK(m_of_t(s, q) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("smooth_solve: zero datum stays zero") {
    SmoothSolveConfig cfg;
    cfg.kernel = Kernel::zero();
    cfg.t_ceiling = 0.3;
    const GridFunction z = GridFunction::periodic(pi, 64);
    const SmoothTrajectory tr = smooth_solve(z, cfg);
    CHECK_FALSE(tr.ceiling_reached);
    CHECK(norm(tr.snapshots.back(), norm_inf) == 0.0);
}

TEST_CASE("smooth_solve: kernel-off Burgers from -sin breaks at t = 1") {
    SmoothSolveConfig cfg;
    cfg.kernel = Kernel::zero();
    cfg.m_ceiling = 30.0;
    cfg.t_ceiling = 2.0;
    const GridFunction u0 = GridFunction::periodic(pi, 1024, [](double x) {
        return -std::sin(x);
    });
    const SmoothTrajectory tr = smooth_solve(u0, cfg);
    REQUIRE(tr.ceiling_reached);
    REQUIRE(tr.observed_Tstar.has_value());
    CHECK(*tr.observed_Tstar >= 0.98);
    CHECK(*tr.observed_Tstar <= 1.02);
    // m(t) follows the Riccati solution 1/(1-t) for plain Burgers.
    for (size_t i = 0; i < tr.times.size(); i += 50) {
        const double t = tr.times[i];
        if (t < 0.9) CHECK(tr.m[i] == doctest::Approx(1.0 / (1.0 - t)).epsilon(0.02));
    }
}

TEST_CASE("smooth_solve rejects under-resolved data and CFL violations") {
    SmoothSolveConfig cfg;
    cfg.kernel = Kernel::zero();
    // Steep datum on a tiny grid: the spectral tail is far above 1e-8.
    const GridFunction bad = GridFunction::periodic(pi, 64, [](double x) {
        return std::tanh(std::sin(x) * 60.0);
    });
    CHECK_THROWS_AS((void)smooth_solve(bad, cfg), ResolutionError);

    const GridFunction u0 = GridFunction::periodic(pi, 256, [](double x) {
        return -std::sin(x);
    });
    SmoothSolveConfig loose;
    loose.kernel = Kernel::zero();
    loose.dt = 10.0 * u0.dx();  // far beyond the advective limit
    CHECK_THROWS(smooth_solve(u0, loose));
}

TEST_CASE("criterion_quadratic: threshold, scaling monotonicity, bracket shape") {
    const int n = 2048;
    const double P = 8.0 * pi;
    const GridFunction shape = GridFunction::periodic(P, n, [](double x) {
        return -x * std::exp(-x * x);
    });
    const BreakingCriterion weak = criterion_quadratic(shape, 0.5, 0.25);
    CHECK_FALSE(weak.satisfied);  // amplitude 1 is below threshold for this shape

    // Degree-1 left side vs degree-1/2 right side: once satisfied, any
    // larger amplitude stays satisfied.
    bool was_satisfied = false;
    for (double lam : {1.0, 4.0, 16.0, 64.0, 256.0}) {
        const BreakingCriterion c = criterion_quadratic(lam * shape, 0.5, 0.25);
        if (was_satisfied) CHECK(c.satisfied);
        was_satisfied = was_satisfied || c.satisfied;
    }
    CHECK(was_satisfied);

    const BreakingCriterion c = criterion_quadratic(64.0 * shape, 0.5, 0.25);
    CHECK(c.T_hi / c.T_lo == doctest::Approx((1.0 + 0.25) / (1.0 - 0.25)).epsilon(1e-12));

    CHECK_THROWS(criterion_quadratic(shape, 0.5, 0.3));
    CHECK_THROWS(criterion_quadratic(shape, 0.5, 0.0));
}

TEST_CASE("criterion_growth collapses to the quadratic constants at Gamma = 0") {
    const int n = 2048;
    const double P = 8.0 * pi;
    const GridFunction u0 = GridFunction::periodic(P, n, [](double x) {
        return -10.0 * x * std::exp(-x * x);
    });
    const Flux b = Flux::burgers();  // Gamma = 0, f''(0) = 1
    const BreakingCriterion g = criterion_growth(u0, b, 3.0, 0.05);
    // eta1 -> ||u'||^2 ||u''||^2 and eta2 -> sqrt(2) f''(0).
    CHECK(g.eta1 == doctest::Approx(std::pow(g.du_l2 * g.d2u_l2, 2.0)).epsilon(1e-12));
    CHECK(g.eta2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    // eta^2 equals Z(0) = 2^{3/2} a ||u'||^{1/2} ||u''||^{1/2} at a = 1/2.
    CHECK(g.eta * g.eta ==
          doctest::Approx(std::sqrt(2.0) * std::sqrt(g.du_l2 * g.d2u_l2)).epsilon(1e-10));
    // p = 0 gives theta_p = 1/8.
    CHECK(g.theta_p == doctest::Approx(0.125).epsilon(1e-15));

    CHECK_THROWS(criterion_growth(u0, b, 3.0, 0.2));  // theta >= theta_p
}

TEST_CASE("criterion_general: lambda2 closed form and theta range") {
    // lambda2 = 3^6 2 C_K^3 ||v||_2^2 / (alpha2 ||v||_inf^3) = 1458 at the
    // normalized datum with alpha2 = C_K = 1.
    const double val = 729.0 * 2.0 * 1.0 / 1.0;
    CHECK(val == doctest::Approx(1458.0));

    const int n = 1024;
    const GridFunction u0 = GridFunction::periodic(4.0, n, [](double x) {
        return -x * std::exp(-x * x);
    });
    const Flux q = Flux::quadratic(0.5);
    const BreakingCriterion c = criterion_general(u0, q, 1.0, 3.0, 1.0 / 16.0);
    CHECK(c.alpha3 == doctest::Approx(0.0));
    // With alpha3 = 0, lambda1^2 = 2 alpha2 ||v'|| sqrt(||v''||^2)^{1/4}...
    // cross-check against the quadratic Z(0) scaling: lambda1^2 >= Z(0).
    const double Z0 = std::pow(2.0, 1.5) * 0.5 * std::sqrt(c.du_l2 * c.d2u_l2);
    CHECK(c.lambda1 * c.lambda1 >= Z0 - 1e-12);
    CHECK(c.lambda1 * c.lambda1 ==
          doctest::Approx(std::sqrt(2.0) * Z0).epsilon(1e-10));

    CHECK_THROWS(criterion_general(u0, q, 1.0, 3.0, 0.125));
    // Larger theta tightens the first term's denominator: threshold grows
    // once the first term dominates.
    const BreakingCriterion lo = criterion_general(u0, q, 3.0, 3.0, 0.06);
    const BreakingCriterion hi = criterion_general(u0, q, 3.0, 3.0, 0.124);
    CHECK(hi.threshold > lo.threshold);
}

TEST_CASE("integrate_bound_system: frozen and exponential regimes") {
    std::vector<double> t;
    for (int i = 0; i <= 200; ++i) t.push_back(i / 200.0);
    BoundSystemInputs in;
    in.du_l2_sq = 2.0;
    in.d2u_l2_sq = 3.0;
    in.du_l6_p6 = 4.0;
    in.M = 1.0;
    in.f2_at_0 = 1.0;

    {  // m = 0, C_G = Gamma = 0: all series constant
        const std::vector<double> m(t.size(), 0.0);
        const BoundSystemTrace tr = integrate_bound_system(t, m, in, BoundVariant::growth);
        for (size_t i = 0; i < tr.t.size(); ++i) {
            CHECK(tr.z1[i] == doctest::Approx(2.0).epsilon(1e-14));
            CHECK(tr.z6[i] == doctest::Approx(4.0).epsilon(1e-14));
            CHECK(tr.z2_tilde[i] == doctest::Approx(3.0).epsilon(1e-14));
        }
    }
    {  // m = 1 constant: z1(t) = z1(0) e^t to integrator accuracy
        const std::vector<double> m(t.size(), 1.0);
        const BoundSystemTrace tr = integrate_bound_system(t, m, in, BoundVariant::growth);
        CHECK(tr.z1.back() == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-8));
        CHECK(tr.z6.back() == doctest::Approx(4.0 * std::exp(5.0)).epsilon(1e-6));
    }
}

TEST_CASE("breaking_set_membership: zero datum, T-monotonicity, amplitude sweep") {
    const Flux b = Flux::burgers();
    const int n = 2048;
    const double P = 8.0 * pi;
    const GridFunction zero = GridFunction::periodic(P, n);
    CHECK_FALSE(breaking_set_membership(zero, b, 1.0, 3.0));

    const GridFunction shape = GridFunction::periodic(P, n, [](double x) {
        return -x * std::exp(-x * x);
    });
    bool found = false;
    double found_lambda = 0.0;
    for (double lam : {1.0, 8.0, 64.0, 512.0}) {
        if (breaking_set_membership(lam * shape, b, 1.0, 3.0)) {
            found = true;
            found_lambda = lam;
            break;
        }
    }
    CHECK(found);
    // Membership at T implies membership at 2T (the last threshold halves).
    CHECK(breaking_set_membership(found_lambda * shape, b, 2.0, 3.0));
}

TEST_CASE("w along characteristics: constant state and kernel-off Riccati") {
    SmoothSolveConfig cfg;
    cfg.kernel = Kernel::zero();
    cfg.m_ceiling = 8.0;
    cfg.t_ceiling = 2.0;
    cfg.snapshot_stride = 2;
    const GridFunction u0 = GridFunction::periodic(pi, 1024, [](double x) {
        return -std::sin(x);
    });
    const SmoothTrajectory tr = smooth_solve(u0, cfg);
    const std::vector<double> betas = {-0.3, -0.1, 0.0, 0.1, 0.3};
    const auto wc = w_along_characteristics(tr, Flux::burgers(), betas);
    // For the zero kernel dw/dt = w^2 exactly; finite differencing along the
    // snapshot grid leaves a residual small against the w^2 scale.
    CHECK(wc.max_residual < 0.05 * cfg.m_ceiling * cfg.m_ceiling);
    CHECK(wc.sup_w_vs_m_max_relerr < 0.02);

    // Constant state: w identically zero.
    SmoothSolveConfig ccfg;
    ccfg.kernel = Kernel::zero();
    ccfg.t_ceiling = 1.0;
    ccfg.snapshot_stride = 1;
    const GridFunction c0 = GridFunction::periodic(pi, 64, [](double) { return 0.4; });
    const SmoothTrajectory ct = smooth_solve(c0, ccfg);
    const auto cw = w_along_characteristics(ct, Flux::burgers(), {0.0, 1.0});
    CHECK(cw.max_residual < 1e-12);
}

TEST_CASE("breaking report serializes its key fields") {
    BreakingReport rep;
    rep.criterion.theorem = CriterionKind::quadratic;
    rep.criterion.theta = 0.25;
    rep.criterion.satisfied = true;
    rep.criterion.T_lo = 0.05;
    rep.criterion.T_hi = 0.08;
    rep.observed_Tstar = 0.06;
    rep.inside_bracket = true;
    rep.domain_note = "test";
    std::ostringstream os;
    rep.write(os);
    const std::string s = os.str();
    CHECK(s.find("theorem = quadratic") != std::string::npos);
    CHECK(s.find("observed_Tstar = 0.06") != std::string::npos);
    CHECK(s.find("inside_bracket = true") != std::string::npos);
}
