#ifndef BHLAB_WAVEBREAK_HPP
#define BHLAB_WAVEBREAK_HPP

#include "bhlab/flux.hpp"
#include "bhlab/grid.hpp"
#include "bhlab/kernels.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhlab {

/// Thrown when the pseudospectral solver loses resolution before the
/// gradient ceiling is reached.
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// |inf_x d/dx f'(u)| clamped at 0; the blow-up indicator.
double m_of_t(const GridFunction& u, const Flux& flux);

struct SmoothSolveConfig {
    Flux flux = Flux::burgers();
    Kernel kernel = Kernel::hilbert();
    double dt = 0.0;            // must satisfy dt <= 0.5 dx / max|f'(u0)|
    double m_ceiling = 100.0;   // stop once m(t) exceeds this
    double t_ceiling = 10.0;    // wall-clock of the model problem
    int snapshot_stride = 4;    // keep every k-th state for path sampling
    double riccati_safety = 0.02;  // extra step control dt <= safety/m
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // rms misfit
};

/** Trajectory of the smooth-regime pseudospectral solver: per-step series
 *  of m(t) and the Sobolev norms entering the bound systems, plus strided
 *  state snapshots. */
struct SmoothTrajectory {
    std::vector<double> times;
    std::vector<double> m;
    std::vector<double> ux_l2_sq;   // ||u_x||_2^2
    std::vector<double> uxx_l2_sq;  // ||u_xx||_2^2
    std::vector<double> ux_l6_p6;   // ||u_x||_6^6
    std::vector<double> snap_times;
    std::vector<GridFunction> snapshots;
    bool ceiling_reached = false;
    std::optional<double> observed_Tstar;  // extrapolated from the 1/m fit
    LinearFit inv_m_fit;
};

/** Spectral-derivative / spectral-source evolution of u_t + f(u)_x = G[u]
 *  with explicit 4th-order steps and 2/3-rule dealiasing of the flux term,
 *  until m(t) exceeds m_ceiling or t_ceiling is reached.  The blow-up time
 *  is extrapolated by a least-squares line through 1/m(t) over the last
 *  decade of growth.  Throws ResolutionError if the spectral tail rises
 *  above 1e-2 of the peak mode first. */
SmoothTrajectory smooth_solve(const GridFunction& u0, const SmoothSolveConfig& cfg);

enum class CriterionKind { quadratic, growth, general };

/** Outcome of a wave-breaking criterion: the threshold comparison, all
 *  derived constants, and the predicted bracket [T_lo, T_hi] when the
 *  criterion is satisfied. */
struct BreakingCriterion {
    CriterionKind theorem = CriterionKind::quadratic;
    double theta = 0.25;
    // inputs as applicable
    double a = 0.0, Gamma = 0.0, p = 0.0, C_G = 0.0, C_K = 0.0, f2_at_0 = 0.0;
    // norms of the initial datum
    double l2 = 0.0, du_l2 = 0.0, d2u_l2 = 0.0, du_l6 = 0.0, linf = 0.0;
    double inf_du = 0.0;   // inf u'
    double inf_dfu = 0.0;  // inf [f'(u)]'
    // derived quantities
    double theta_p = 0.0, eta1 = 0.0, eta2 = 0.0, eta = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0;
    double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0;
    double m0 = 0.0, threshold = 0.0;
    bool satisfied = false;
    double T_lo = 0.0, T_hi = 0.0;
};

/// |inf u'| > 2^{3/4} a^{1/2} theta^{-1/2} ||u'||^{1/4} ||u''||^{1/4};
/// bracket 1/(2a(1 +- theta) |inf u'|).  theta in (0, 1/4].
BreakingCriterion criterion_quadratic(const GridFunction& u0, double a, double theta);

/// Growth-condition criterion for C^3 fluxes with |f'''| <= Gamma(1+|u|^p):
/// threshold max{ 2(1+6C_G+Gamma)/((2-3p)-16 theta), eta/theta^{1/2} }.
BreakingCriterion criterion_growth(const GridFunction& u0, const Flux& flux, double C_G,
                                   double theta);

/// General strictly convex C^3 flux: threshold
/// max{ (alpha3+6C_G+1)/(1-8theta), lambda1/theta^{1/2}, lambda2 theta/(1-theta)^3 }.
BreakingCriterion criterion_general(const GridFunction& u0, const Flux& flux, double C_K,
                                    double C_G, double theta);

enum class BoundVariant { growth, general };

struct BoundSystemInputs {
    double du_l2_sq = 0.0;   // z1(0)
    double d2u_l2_sq = 0.0;  // z2~(0)
    double du_l6_p6 = 0.0;   // z6(0)
    double Gamma = 0.0, p = 0.0, C_G = 0.0;
    double M = 0.0;        // ||u0||_2
    double f2_at_0 = 0.0;  // alpha1 = sqrt(2) f''(0) in the growth variant
    double alpha2 = 0.0, alpha3 = 0.0;  // general variant only
};

/** Comparison series driven by a measured m(t):
 *    z1' = m z1,   z6' = (5m + 6 C_G) z6,
 *    z2~' = (5m + Gamma) z2~ + Gamma (2 + 2^{p+1} M^p z1^{p/2}) z6   (growth)
 *    z2~' = (5m + alpha3) z2~ + alpha3 z6                            (general)
 *  with the composite Z1, Z2, Z majorant series. */
struct BoundSystemTrace {
    std::vector<double> t;
    std::vector<double> z1, z6, z2_tilde, Z1, Z2, Z;
    bool overflowed = false;  // bounds blew up before the solution did
    size_t valid_count = 0;   // entries before overflow
};

BoundSystemTrace integrate_bound_system(const std::vector<double>& times,
                                        const std::vector<double>& m_series,
                                        const BoundSystemInputs& in, BoundVariant variant);

struct DominationReport {
    bool dominated = true;
    double worst_excess = 0.0;  // max over series of measured/bound - 1
    size_t checked = 0;
};

/// measured series <= bound series pointwise for t <= t_limit, with slack tol.
DominationReport check_domination(const BoundSystemTrace& trace,
                                  const std::vector<double>& times,
                                  const std::vector<double>& ux_l2_sq,
                                  const std::vector<double>& uxx_l2_sq,
                                  const std::vector<double>& ux_l6_p6, double t_limit,
                                  double tol);

/** Sampling of w(t;beta) = -[f'(u)]_x along forward characteristics
 *  x' = f'(u).  Residuals |w' - w^2| are compared against the Z series. */
struct WCharacteristics {
    std::vector<double> times;                 // sample times (snapshot grid)
    std::vector<std::vector<double>> w;        // per foot
    std::vector<bool> dropped;                 // foot left the resolved domain
    double max_residual = 0.0;                 // max |w' - w^2|
    double max_residual_minus_Z = 0.0;         // against a supplied Z series
    double sup_w_vs_m_max_relerr = 0.0;        // sup_beta w vs m(t)
};

WCharacteristics w_along_characteristics(const SmoothTrajectory& traj, const Flux& flux,
                                         const std::vector<double>& betas,
                                         const std::vector<double>& Z_times = {},
                                         const std::vector<double>& Z_series = {});

/// Membership in the open set of H^2 data breaking before time T:
/// m0(v) > max{ (1+6C_G+Gamma)/(4 theta_p), sqrt(2) eta(v)/sqrt(theta_p),
///              2/((2-theta_p) T) }.
bool breaking_set_membership(const GridFunction& v, const Flux& flux, double T, double C_G);

/** Full experiment record: criterion, observed against predicted bracket,
 *  extrapolation fit and the bound-system trace.  Serializes to a nested
 *  key/value text document. */
struct BreakingReport {
    BreakingCriterion criterion;
    std::optional<double> observed_Tstar;
    LinearFit extrapolation_fit;
    bool inside_bracket = false;
    BoundSystemTrace trace;
    std::string domain_note;  // line-data-on-periodic-box emulation record

    void write(std::ostream& os) const;
};

}  // namespace bhlab

#endif
