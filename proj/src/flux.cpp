#include "bhlab/flux.hpp"

#include <cmath>
#include <stdexcept>

namespace bhlab {

Flux Flux::quadratic(double a, double b, double c) {
    if (!(a > 0.0)) throw std::invalid_argument("quadratic flux: a must be positive");
    Flux fl;
    fl.kind_ = FluxKind::quadratic;
    fl.a_ = a;
    fl.b_ = b;
    fl.c_ = c;
    fl.C_f_ = 2.0 * a;
    fl.p1_ = fl.p2_ = 1.0;
    fl.Gamma_ = 0.0;
    fl.p_ = 0.0;
    fl.has_a2_ = true;
    fl.sonic_ = -b / (2.0 * a);
    fl.validate();
    return fl;
}

Flux Flux::power(double p1) {
    if (!(p1 >= 1.0)) throw std::invalid_argument("power flux: p1 must be >= 1");
    Flux fl;
    fl.kind_ = FluxKind::power;
    fl.power_p1_ = p1;
    fl.C_f_ = std::pow(2.0, 1.0 - p1);
    fl.p1_ = fl.p2_ = p1;
    // f''' is unbounded near 0 unless p1 = 1 (then the flux is u^2/2) or
    // p1 >= 2; no (A2) data for the fractional range.
    fl.has_a2_ = (p1 == 1.0);
    fl.Gamma_ = 0.0;
    fl.p_ = 0.0;
    fl.sonic_ = 0.0;
    fl.validate();
    return fl;
}

Flux Flux::custom(std::function<double(double)> f, std::function<double(double)> df,
                  std::function<double(double)> d2f, std::function<double(double)> d3f,
                  double C_f, double p1, double p2, double Gamma, double p) {
    if (!(p1 >= 1.0 && p1 <= p2 && p2 < p1 + 2.0))
        throw std::invalid_argument("custom flux: need 1 <= p1 <= p2 < p1+2");
    Flux fl;
    fl.kind_ = FluxKind::custom;
    fl.f_ = std::move(f);
    fl.df_ = std::move(df);
    fl.d2f_ = std::move(d2f);
    fl.d3f_ = std::move(d3f);
    fl.C_f_ = C_f;
    fl.p1_ = p1;
    fl.p2_ = p2;
    fl.has_a2_ = Gamma >= 0.0;
    fl.Gamma_ = fl.has_a2_ ? Gamma : 0.0;
    fl.p_ = fl.has_a2_ ? p : 0.0;
    // Sonic state by bisection on f'.
    double lo = -1.0, hi = 1.0;
    while (fl.df_(lo) > 0.0 && lo > -1e8) lo *= 2.0;
    while (fl.df_(hi) < 0.0 && hi < 1e8) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fl.df_(mid) < 0.0 ? lo : hi) = mid;
    }
    fl.sonic_ = 0.5 * (lo + hi);
    fl.validate();
    return fl;
}

double Flux::f(double u) const {
    switch (kind_) {
        case FluxKind::quadratic: return a_ * u * u + b_ * u + c_;
        case FluxKind::power: return std::pow(std::abs(u), 1.0 + power_p1_) / (1.0 + power_p1_);
        case FluxKind::custom: return f_(u);
    }
    return 0.0;
}

double Flux::df(double u) const {
    switch (kind_) {
        case FluxKind::quadratic: return 2.0 * a_ * u + b_;
        case FluxKind::power: {
            const double v = std::pow(std::abs(u), power_p1_);
            return u >= 0.0 ? v : -v;
        }
        case FluxKind::custom: return df_(u);
    }
    return 0.0;
}

double Flux::d2f(double u) const {
    switch (kind_) {
        case FluxKind::quadratic: return 2.0 * a_;
        case FluxKind::power:
            return power_p1_ * std::pow(std::abs(u), power_p1_ - 1.0);
        case FluxKind::custom: return d2f_(u);
    }
    return 0.0;
}

double Flux::d3f(double u) const {
    switch (kind_) {
        case FluxKind::quadratic: return 0.0;
        case FluxKind::power: {
            if (power_p1_ == 1.0) return 0.0;
            const double v = power_p1_ * (power_p1_ - 1.0) *
                             std::pow(std::abs(u), power_p1_ - 2.0);
            return u >= 0.0 ? v : -v;
        }
        case FluxKind::custom: return d3f_(u);
    }
    return 0.0;
}

double Flux::lambda_M(double M) const {
    if (kind_ == FluxKind::quadratic) return M + std::abs(b_) / (2.0 * a_);
    // Mesh supremum; adjacent pairs realize the sup for smooth f by the
    // mean-value ratio f'(xi)/f''(xi).
    const int m = 512;
    double sup = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < std::min(m, i + 8); ++j) {
            const double u = -M + 2.0 * M * i / (m - 1);
            const double v = -M + 2.0 * M * j / (m - 1);
            const double den = std::abs(df(u) - df(v));
            if (den > 1e-14) sup = std::max(sup, std::abs(f(u) - f(v)) / den);
        }
    }
    return sup;
}

void Flux::validate() const {
    // Strict convexity: f' strictly increasing on a sampled mesh.
    const double M = 20.0;
    const int m = 257;
    double prev = df(-M);
    for (int i = 1; i < m; ++i) {
        const double u = -M + 2.0 * M * i / (m - 1);
        const double cur = df(u);
        if (!(cur > prev))
            throw std::invalid_argument("Flux::validate: f' is not strictly increasing");
        prev = cur;
    }
    if (!(p1_ >= 1.0 && p1_ <= p2_ && p2_ < p1_ + 2.0))
        throw std::invalid_argument("Flux::validate: exponents must satisfy 1 <= p1 <= p2 < p1+2");
    if (has_a2_) {
        if (!(p_ >= 0.0 && p_ < 2.0 / 3.0))
            throw std::invalid_argument("Flux::validate: third-derivative exponent p must be in [0,2/3)");
        for (int i = 0; i < m; ++i) {
            const double u = -M + 2.0 * M * i / (m - 1);
            if (std::abs(d3f(u)) > Gamma_ * (1.0 + std::pow(std::abs(u), p_)) + 1e-12)
                throw std::invalid_argument("Flux::validate: |f'''| <= Gamma (1+|u|^p) fails");
        }
    }
}

double phi_f(const Flux& flux, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("phi_f: s must be positive");
    switch (flux.kind()) {
        case FluxKind::quadratic:
            return flux.C_f() * s;  // increment of an affine f' is a-independent
        case FluxKind::power:
            return flux.C_f() * std::pow(s, flux.p1());  // attained at a = -s/2
        case FluxKind::custom: {
            const double A = std::max(10.0, 10.0 * s);
            const int m = 4096;
            double inf = flux.df(-A + s) - flux.df(-A);
            for (int i = 1; i < m; ++i) {
                const double a = -A + 2.0 * A * i / (m - 1);
                inf = std::min(inf, flux.df(a + s) - flux.df(a));
            }
            return inf;
        }
    }
    return 0.0;
}

double M_t_bound(const Flux& flux, double t, double l2_initial) {
    if (!(t > 0.0)) throw std::invalid_argument("M_t_bound: t must be positive");
    return 4.0 * std::pow(l2_initial * l2_initial / (flux.C_f() * t), 1.0 / (flux.p1() + 2.0));
}

double M_t_bound_l1(const Flux& flux, double t, double l1_initial) {
    if (!(t > 0.0)) throw std::invalid_argument("M_t_bound_l1: t must be positive");
    return 4.0 * std::pow(l1_initial / (flux.C_f() * t), 1.0 / (flux.p1() + 1.0));
}

double hoelder_Gamma1(const Flux& flux, double G_op_norm, double l2_initial) {
    const double Cf = flux.C_f();
    const double p1 = flux.p1();
    const double gp = flux.p2() / (2.0 + p1);
    const double G = G_op_norm;
    const double inner = std::pow(2.0, 1.0 + p1) +
                         std::pow(2.0, 4.0 + 2.0 * p1) * std::exp(2.0 * G) / Cf *
                             (1.0 + G + G * G) * l2_initial * l2_initial;
    return Cf * std::pow(inner, gp);
}

double hoelder_Gamma3(const Flux& flux, double L_K, double l1_initial) {
    const double Cf = flux.C_f();
    const double p1 = flux.p1();
    if (!(flux.p2() < p1 + 1.0))
        throw std::invalid_argument("hoelder_Gamma3: needs p2 < p1 + 1");
    const double tgp = flux.p2() / (p1 + 1.0);
    const double inner =
        std::pow(2.0, p1) *
        (1.0 + (1.0 + p1) / Cf * (flux.f(0.0) + 2.0 * std::exp(L_K) * l1_initial));
    return Cf * std::pow(inner, tgp);
}

BoundConstants compute_bound_constants(const Flux& flux, double G_op_norm, double l2_initial,
                                       double L_K, double l1_initial) {
    BoundConstants bc;
    bc.gamma_p = flux.p2() / (2.0 + flux.p1());
    bc.Gamma1 = hoelder_Gamma1(flux, G_op_norm, l2_initial);
    if (flux.p2() < flux.p1() + 1.0) {
        bc.tilde_gamma_p = flux.p2() / (flux.p1() + 1.0);
        if (std::isfinite(L_K)) bc.Gamma3 = hoelder_Gamma3(flux, L_K, l1_initial);
    }
    return bc;
}

}  // namespace bhlab
