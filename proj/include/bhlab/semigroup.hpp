#ifndef BHLAB_SEMIGROUP_HPP
#define BHLAB_SEMIGROUP_HPP

#include "bhlab/flux.hpp"
#include "bhlab/grid.hpp"
#include "bhlab/kernels.hpp"

namespace bhlab {

/** Entropy-solution semigroup S_t of u_t + f(u)_x = 0: Godunov finite
 *  volume with the exact convex-flux Riemann flux
 *    F(a,b) = min_{[a,b]} f   (a <= b),   max_{[b,a]} f   (a > b),
 *  time step restricted by cfl * dx / max |f'(u)|.  Line domains use zero
 *  ghost states (compact-support convention), periodic domains wrap. */
GridFunction godunov_evolve(const GridFunction& u0, double t, const Flux& flux,
                            double cfl = 0.45);

/** Entropy solution by discrete minimization of the variational form
 *  min_y [ U0(y) + t f*((x-y)/t) ] with U0 the primitive of u0 and f* the
 *  Legendre transform, evaluated on a velocity mesh with 4x oversampling.
 *  Brute-force oracle; cost is irrelevant. */
double lax_oleinik_oracle(const GridFunction& u0, double t, const Flux& flux, double x);

/// Oracle sampled on the whole grid of u0.
GridFunction lax_oleinik_profile(const GridFunction& u0, double t, const Flux& flux);

/** One-sided Lipschitz (Oleinik) scan: max over grid pairs x < y of
 *  f'(u(y)) - f'(u(x)) - (y-x)/t, computed in O(n) by tracking the running
 *  minimum of f'(u(x)) - x/t. */
double oleinik_check(const GridFunction& u, double t, const Flux& flux);

/// measured = ||u||_inf against M_t = 4 (l2^2/(C_f t))^{1/(p1+2)}.
CheckPair linf_decay_check(const GridFunction& u, double t, const Flux& flux,
                           double l2_initial);

/// L^1 variant: M = 4 (l1/(C_f t))^{1/(p1+1)}.
CheckPair linf_decay_check_l1(const GridFunction& u, double t, const Flux& flux,
                              double l1_initial);

/** measured = TV^{1/p1}{u;[a,b]} against
 *  bound = (2/C_f) ((b-a)/t + ||f'||_{L^inf([-M_t,M_t])}). */
CheckPair fractional_tv_bound_check(const GridFunction& u, double t, const Flux& flux,
                                    double a, double b, double l2_initial);

/** Oleinik-type scan for L^1-kernel runs: max over pairs x1 < x2 of
 *  f'(u(x2)) - f'(u(x1)) - max{ 4(x2-x1)/tau, 2 sqrt(C_T (x2-x1)) }. */
double l1kernel_oleinik_check(const GridFunction& u, double tau, double C_T,
                              const Flux& flux);

/// Smallest C_T making l1kernel_oleinik_check nonpositive (empirical fit).
double fit_l1kernel_oleinik_constant(const GridFunction& u, double tau, const Flux& flux);

/// sup over [-M, M] of |f'|, by closed form or mesh.
double df_sup_on_interval(const Flux& flux, double M);

}  // namespace bhlab

#endif
