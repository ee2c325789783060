#ifndef BHLAB_FLUX_HPP
#define BHLAB_FLUX_HPP

#include <functional>
#include <optional>

namespace bhlab {

enum class FluxKind { quadratic, power, custom };

/** Strictly convex flux together with its structural constants:
 *  C_f, p1, p2 with |f'(s)| <= C_f (1+|s|)^{p2} and
 *  inf_a (f'(a+s)-f'(a))/s^{p1} >= C_f, the C^3 growth data (Gamma, p) with
 *  |f'''(u)| <= Gamma (1+|u|^p), and the Lambda_M evaluator
 *  sup_{|u|,|v|<=M} |f(u)-f(v)| / |f'(u)-f'(v)|.
 *
 *  Built-ins: quadratic a u^2 + b u + c (C_f = 2a, p1 = p2 = 1) and the
 *  power flux |u|^{1+p1}/(1+p1) (C_f = 2^{1-p1}, p2 = p1). */
class Flux {
  public:
    static Flux burgers() { return quadratic(0.5, 0.0, 0.0); }
    static Flux quadratic(double a, double b = 0.0, double c = 0.0);
    static Flux power(double p1);
    /// Gamma < 0 declares that no |f'''| <= Gamma (1+|u|^p) envelope is
    /// claimed (the growth criterion then rejects this flux).
    static Flux custom(std::function<double(double)> f, std::function<double(double)> df,
                       std::function<double(double)> d2f, std::function<double(double)> d3f,
                       double C_f, double p1, double p2, double Gamma = -1.0, double p = 0.0);

    double f(double u) const;
    double df(double u) const;
    double d2f(double u) const;
    double d3f(double u) const;

    FluxKind kind() const { return kind_; }
    double quadratic_a() const { return a_; }
    double C_f() const { return C_f_; }
    double p1() const { return p1_; }
    double p2() const { return p2_; }
    /// Growth data of f'''; zero Gamma means f''' == 0 (quadratic).
    double Gamma() const { return Gamma_; }
    double p_growth() const { return p_; }
    bool has_third_derivative_growth() const { return has_a2_; }
    double f2_at_0() const { return d2f(0.0); }

    /// Argmin of f (the sonic state), used by the Godunov flux.
    double sonic_point() const { return sonic_; }

    /// Lambda_M = sup_{|u|,|v| <= M} |f(u)-f(v)| / |f'(u)-f'(v)|.
    double lambda_M(double M) const;

    /// Sampled structural checks (strict convexity, growth exponents);
    /// throws on violation.
    void validate() const;

  private:
    Flux() = default;
    FluxKind kind_ = FluxKind::quadratic;
    double a_ = 0.5, b_ = 0.0, c_ = 0.0;
    double power_p1_ = 1.0;
    std::function<double(double)> f_, df_, d2f_, d3f_;
    double C_f_ = 1.0, p1_ = 1.0, p2_ = 1.0;
    double Gamma_ = 0.0, p_ = 0.0;
    bool has_a2_ = true;
    double sonic_ = 0.0;
};

/** Phi_f(s) = inf_a (f'(a+s) - f'(a)), the modulus of strict convexity.
 *  Closed form for quadratic (2 a s) and power (2^{1-p1} s^{p1}) fluxes;
 *  mesh minimization for custom ones.  Always >= C_f s^{p1}. */
double phi_f(const Flux& flux, double s);

/// The decay thresholds of the conservation-law semigroup:
/// M_t = 4 (l2^2/(C_f t))^{1/(p1+2)} and the L^1 variant
/// 4 (l1/(C_f t))^{1/(p1+1)}.
double M_t_bound(const Flux& flux, double t, double l2_initial);
double M_t_bound_l1(const Flux& flux, double t, double l1_initial);

/** Derived Hoelder/Oleinik constants.
 *    gamma_p       = p2 / (2 + p1)
 *    tilde_gamma_p = p2 / (p1 + 1)           (needs p2 < p1 + 1)
 *    Gamma1: characteristic Hoelder constant from (C_f, G_op_norm, ||u0||_2)
 *    Gamma3: its L^1-kernel analogue from (C_f, L_K, ||u0||_1). */
struct BoundConstants {
    double gamma_p = 0.0;
    double tilde_gamma_p = 0.0;
    double Gamma1 = 0.0;
    double Gamma3 = 0.0;
};

double hoelder_Gamma1(const Flux& flux, double G_op_norm, double l2_initial);
double hoelder_Gamma3(const Flux& flux, double L_K, double l1_initial);
BoundConstants compute_bound_constants(const Flux& flux, double G_op_norm, double l2_initial,
                                       double L_K, double l1_initial);

}  // namespace bhlab

#endif
