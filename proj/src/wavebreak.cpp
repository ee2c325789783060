#include "bhlab/wavebreak.hpp"

#include "bhlab/fft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>

namespace bhlab {

namespace {

struct SpectralWorkspace {
    int n;
    double k0;  // wavenumber of mode 1
    int cut;    // 2/3-rule cutoff index

    explicit SpectralWorkspace(const GridFunction& g)
        : n(g.n()), k0(M_PI / g.half_extent()), cut(g.n() / 3) {}

    std::vector<double> derivative(const std::vector<std::complex<double>>& spec) const {
        auto s = spec;
        for (int m = 0; m < static_cast<int>(s.size()); ++m)
            s[m] *= std::complex<double>(0.0, k0 * m);
        if (n % 2 == 0) s[n / 2] = 0.0;
        return fft_inverse(s, n);
    }

    std::vector<double> second_derivative(const std::vector<std::complex<double>>& spec) const {
        auto s = spec;
        for (int m = 0; m < static_cast<int>(s.size()); ++m) {
            const double k = k0 * m;
            s[m] *= -k * k;
        }
        return fft_inverse(s, n);
    }

    void dealias(std::vector<std::complex<double>>& spec) const {
        for (int m = cut + 1; m < static_cast<int>(spec.size()); ++m) spec[m] = 0.0;
    }

    // Peak magnitude of the band just below the dealiasing cutoff, relative
    // to the spectrum peak.
    double tail_ratio(const std::vector<std::complex<double>>& spec) const {
        double peak = 0.0, tail = 0.0;
        const int band_lo = (4 * cut) / 5;
        for (int m = 0; m <= cut; ++m) {
            const double a = std::abs(spec[m]);
            peak = std::max(peak, a);
            if (m >= band_lo) tail = std::max(tail, a);
        }
        return peak > 0.0 ? tail / peak : 0.0;
    }

    std::vector<double> hilbert(const std::vector<std::complex<double>>& spec) const {
        auto s = spec;
        s[0] = 0.0;
        for (int m = 1; m < static_cast<int>(s.size()); ++m)
            s[m] *= std::complex<double>(0.0, -1.0);
        if (n % 2 == 0) s[n / 2] = 0.0;
        return fft_inverse(s, n);
    }
};

}  // namespace

double m_of_t(const GridFunction& u, const Flux& flux) {
    const GridFunction ux = derivative(u, 1, DerivMethod::spectral);
    double inf = 0.0;
    for (int i = 0; i < u.n(); ++i)
        inf = std::min(inf, flux.d2f(u[i]) * ux[i]);
    return -inf;  // 0 when the slope of f'(u) is nonnegative everywhere
}

namespace {

class SmoothRhs {
  public:
    SmoothRhs(const GridFunction& proto, const SmoothSolveConfig& cfg)
        : ws_(proto), cfg_(cfg), proto_(proto) {
        spectral_source_ = cfg.kernel.kind() == KernelKind::hilbert ||
                           cfg.kernel.kind() == KernelKind::periodic_hilbert;
        if (!spectral_source_ && cfg.kernel.kind() != KernelKind::zero) {
            const int jmax = (proto.n() - 1) / 2;
            quad_coef_.assign(jmax + 1, 0.0);
            for (int j = 1; j <= jmax; ++j)
                quad_coef_[j] = cfg.kernel.eval(j * proto.dx()) * proto.dx();
        }
    }

    std::vector<double> operator()(const std::vector<double>& u) const {
        const int n = ws_.n;
        std::vector<double> fu(n);
        for (int i = 0; i < n; ++i) fu[i] = cfg_.flux.f(u[i]);
        auto spec = fft_forward(fu);
        ws_.dealias(spec);
        std::vector<double> out = ws_.derivative(spec);
        for (double& v : out) v = -v;
        if (cfg_.kernel.kind() == KernelKind::zero) return out;
        if (spectral_source_) {
            const auto su = fft_forward(u);
            const auto g = ws_.hilbert(su);
            for (int i = 0; i < n; ++i) out[i] += g[i];
        } else {
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                int il = i, ir = i;
                for (size_t j = 1; j < quad_coef_.size(); ++j) {
                    il = (il == 0) ? n - 1 : il - 1;
                    ir = (ir == n - 1) ? 0 : ir + 1;
                    s += quad_coef_[j] * (u[il] - u[ir]);
                }
                out[i] += s;
            }
        }
        return out;
    }

    const SpectralWorkspace& workspace() const { return ws_; }

  private:
    SpectralWorkspace ws_;
    SmoothSolveConfig cfg_;
    GridFunction proto_;
    bool spectral_source_ = false;
    std::vector<double> quad_coef_;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit fit;
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sxx * sy - sx * sxy) / det;
    double r2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        r2 += r * r;
    }
    fit.residual = std::sqrt(r2 / n);
    return fit;
}

}  // namespace

SmoothTrajectory smooth_solve(const GridFunction& u0, const SmoothSolveConfig& cfg) {
    if (u0.domain() != DomainKind::periodic)
        throw std::invalid_argument("smooth_solve: periodic domain required");
    const int n = u0.n();
    const double dx = u0.dx();

    double amax0 = 0.0;
    for (double v : u0.values()) amax0 = std::max(amax0, std::abs(cfg.flux.df(v)));
    double dt0 = cfg.dt;
    if (dt0 <= 0.0) dt0 = (amax0 > 0.0) ? 0.4 * dx / amax0 : 0.1;
    if (amax0 > 0.0 && dt0 > 0.5 * dx / amax0 * (1.0 + 1e-12))
        throw std::invalid_argument("smooth_solve: dt violates the advective CFL factor 0.5");

    SmoothRhs rhs(u0, cfg);
    const SpectralWorkspace& ws = rhs.workspace();

    // Work with the dealiased representation of the data throughout.
    auto spec0 = fft_forward(u0.values());
    if (ws.tail_ratio(spec0) > 1e-8)
        throw ResolutionError(
            "smooth_solve: initial datum is not resolved (spectral tail above 1e-8)");
    ws.dealias(spec0);
    std::vector<double> u = fft_inverse(spec0, n);

    SmoothTrajectory traj;
    auto record = [&](double t, const std::vector<double>& state) {
        auto spec = fft_forward(state);
        const double tail = ws.tail_ratio(spec);
        if (tail > 1e-2) {
            char msg[128];
            std::snprintf(msg, sizeof(msg),
                          "smooth_solve: spectral tail %.3g at t = %.6g; refine the grid", tail,
                          t);
            throw ResolutionError(msg);
        }
        const auto ux = ws.derivative(spec);
        const auto uxx = ws.second_derivative(spec);
        double inf_vx = 0.0, l2 = 0.0, l22 = 0.0, l6 = 0.0;
        for (int i = 0; i < n; ++i) {
            inf_vx = std::min(inf_vx, cfg.flux.d2f(state[i]) * ux[i]);
            l2 += ux[i] * ux[i];
            l22 += uxx[i] * uxx[i];
            const double q = ux[i] * ux[i];
            l6 += q * q * q;
        }
        traj.times.push_back(t);
        traj.m.push_back(-inf_vx);
        traj.ux_l2_sq.push_back(l2 * dx);
        traj.uxx_l2_sq.push_back(l22 * dx);
        traj.ux_l6_p6.push_back(l6 * dx);
        return -inf_vx;
    };
    auto snapshot = [&](double t, const std::vector<double>& state) {
        traj.snap_times.push_back(t);
        traj.snapshots.push_back(GridFunction::like(u0, state));
    };

    double t = 0.0;
    double m_cur = record(0.0, u);
    snapshot(0.0, u);
    long long step = 0;
    while (t < cfg.t_ceiling) {
        double h = dt0;
        if (m_cur > 0.0) h = std::min(h, cfg.riccati_safety / m_cur);
        h = std::min(h, cfg.t_ceiling - t);

        // Classical RK4.
        const auto k1 = rhs(u);
        std::vector<double> tmp(n);
        for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
        const auto k2 = rhs(tmp);
        for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
        const auto k3 = rhs(tmp);
        for (int i = 0; i < n; ++i) tmp[i] = u[i] + h * k3[i];
        const auto k4 = rhs(tmp);
        for (int i = 0; i < n; ++i)
            u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t += h;
        ++step;

        m_cur = record(t, u);
        if (step % cfg.snapshot_stride == 0) snapshot(t, u);
        if (m_cur > cfg.m_ceiling) {
            traj.ceiling_reached = true;
            break;
        }
    }
    if (traj.snap_times.back() != t) snapshot(t, u);

    if (traj.ceiling_reached) {
        // 1/m is asymptotically affine in t; fit over the last decade of
        // growth and extrapolate to the zero crossing.
        const double m_end = traj.m.back();
        std::vector<double> ts, inv;
        for (size_t i = 0; i < traj.m.size(); ++i) {
            if (traj.m[i] >= 0.1 * m_end && traj.m[i] > 0.0) {
                ts.push_back(traj.times[i]);
                inv.push_back(1.0 / traj.m[i]);
            }
        }
        if (ts.size() >= 5) {
            traj.inv_m_fit = fit_line(ts, inv);
            if (traj.inv_m_fit.slope < 0.0)
                traj.observed_Tstar = -traj.inv_m_fit.intercept / traj.inv_m_fit.slope;
        }
    }
    return traj;
}

namespace {

struct DataNorms {
    double l2, du_l2, d2u_l2, du_l6, linf, inf_du, inf_dfu;
};

DataNorms data_norms(const GridFunction& u0, const Flux& flux) {
    DataNorms d;
    const GridFunction du = derivative(u0, 1, DerivMethod::spectral);
    const GridFunction d2u = derivative(u0, 2, DerivMethod::spectral);
    d.l2 = norm(u0, 2);
    d.du_l2 = norm(du, 2);
    d.d2u_l2 = norm(d2u, 2);
    d.du_l6 = norm(du, 6);
    d.linf = norm(u0, norm_inf);
    d.inf_du = 0.0;
    d.inf_dfu = 0.0;
    for (int i = 0; i < u0.n(); ++i) {
        d.inf_du = std::min(d.inf_du, du[i]);
        d.inf_dfu = std::min(d.inf_dfu, flux.d2f(u0[i]) * du[i]);
    }
    return d;
}

}  // namespace

BreakingCriterion criterion_quadratic(const GridFunction& u0, double a, double theta) {
    if (!(theta > 0.0 && theta <= 0.25))
        throw std::invalid_argument("criterion_quadratic: theta must be in (0, 1/4]");
    if (!(a > 0.0)) throw std::invalid_argument("criterion_quadratic: a must be positive");
    const Flux flux = Flux::quadratic(a);
    const DataNorms d = data_norms(u0, flux);

    BreakingCriterion c;
    c.theorem = CriterionKind::quadratic;
    c.theta = theta;
    c.a = a;
    c.f2_at_0 = 2.0 * a;
    c.l2 = d.l2;
    c.du_l2 = d.du_l2;
    c.d2u_l2 = d.d2u_l2;
    c.du_l6 = d.du_l6;
    c.linf = d.linf;
    c.inf_du = d.inf_du;
    c.inf_dfu = d.inf_dfu;
    c.m0 = 2.0 * a * std::abs(d.inf_du);
    c.alpha1 = std::sqrt(2.0) * c.f2_at_0;
    c.threshold = std::pow(2.0, 0.75) * std::sqrt(a) / std::sqrt(theta) *
                  std::pow(d.du_l2, 0.25) * std::pow(d.d2u_l2, 0.25);
    c.satisfied = std::abs(d.inf_du) > c.threshold;
    if (c.satisfied) {
        c.T_lo = 1.0 / (2.0 * a * (1.0 + theta) * std::abs(d.inf_du));
        c.T_hi = 1.0 / (2.0 * a * (1.0 - theta) * std::abs(d.inf_du));
    }
    return c;
}

namespace {

void fill_growth_constants(BreakingCriterion& c) {
    const double M = c.l2, D1 = c.du_l2, D2 = c.d2u_l2, D6 = c.du_l6;
    const double G = c.Gamma, p = c.p;
    c.theta_p = (2.0 - 3.0 * p) / 16.0;
    c.eta1 = D1 * D1 * D2 * D2 +
             2.0 * G * std::pow(D6, 6.0) *
                 (D1 * D1 + std::pow(2.0, p) * std::pow(M, p) * std::pow(D1, 2.0 + p));
    c.eta2 = std::sqrt(2.0) * c.f2_at_0 +
             G * (4.0 * std::sqrt(M) * std::sqrt(D1) +
                  (p + 2.0) / (p + 1.0) * std::pow(2.0, 1.0 + 0.5 * p) *
                      std::pow(M, 0.5 * (p + 1.0)) * std::pow(D1, 0.5 * (p + 1.0)));
    c.eta = std::pow(c.eta1, 0.125) * std::sqrt(c.eta2);
}

}  // namespace

BreakingCriterion criterion_growth(const GridFunction& u0, const Flux& flux, double C_G,
                                   double theta) {
    if (!flux.has_third_derivative_growth())
        throw std::invalid_argument("criterion_growth: flux has no f''' growth data");
    const double p = flux.p_growth();
    if (!(p >= 0.0 && p < 2.0 / 3.0))
        throw std::invalid_argument("criterion_growth: need p in [0, 2/3)");
    const double theta_p = (2.0 - 3.0 * p) / 16.0;
    if (!(theta > 0.0 && theta < theta_p))
        throw std::invalid_argument("criterion_growth: theta must be in (0, theta_p)");

    const DataNorms d = data_norms(u0, flux);
    BreakingCriterion c;
    c.theorem = CriterionKind::growth;
    c.theta = theta;
    c.Gamma = flux.Gamma();
    c.p = p;
    c.C_G = C_G;
    c.f2_at_0 = flux.f2_at_0();
    c.l2 = d.l2;
    c.du_l2 = d.du_l2;
    c.d2u_l2 = d.d2u_l2;
    c.du_l6 = d.du_l6;
    c.linf = d.linf;
    c.inf_du = d.inf_du;
    c.inf_dfu = d.inf_dfu;
    fill_growth_constants(c);
    c.m0 = std::abs(d.inf_dfu);
    c.threshold = std::max(2.0 * (1.0 + 6.0 * C_G + c.Gamma) / ((2.0 - 3.0 * p) - 16.0 * theta),
                           c.eta / std::sqrt(theta));
    c.satisfied = c.m0 > c.threshold;
    if (c.satisfied) {
        c.T_lo = 1.0 / ((1.0 + theta) * c.m0);
        c.T_hi = 1.0 / ((1.0 - theta) * c.m0);
    }
    return c;
}

BreakingCriterion criterion_general(const GridFunction& u0, const Flux& flux, double C_K,
                                    double C_G, double theta) {
    if (!(theta > 0.0 && theta < 0.125))
        throw std::invalid_argument("criterion_general: theta must be in (0, 1/8)");
    const DataNorms d = data_norms(u0, flux);

    BreakingCriterion c;
    c.theorem = CriterionKind::general;
    c.theta = theta;
    c.C_K = C_K;
    c.C_G = C_G;
    c.f2_at_0 = flux.f2_at_0();
    c.l2 = d.l2;
    c.du_l2 = d.du_l2;
    c.d2u_l2 = d.d2u_l2;
    c.du_l6 = d.du_l6;
    c.linf = d.linf;
    c.inf_du = d.inf_du;
    c.inf_dfu = d.inf_dfu;

    // alpha_i = max |f^{(i)}| over the window |w| <= 2 ||u0||_inf.
    c.alpha1 = 2.0 * d.linf;
    const int mesh = 2001;
    double a2 = 0.0, a3 = 0.0;
    for (int i = 0; i < mesh; ++i) {
        const double w = -c.alpha1 + 2.0 * c.alpha1 * i / (mesh - 1);
        a2 = std::max(a2, std::abs(flux.d2f(w)));
        a3 = std::max(a3, std::abs(flux.d3f(w)));
    }
    c.alpha2 = a2;
    c.alpha3 = a3;

    const double M = d.l2, D1 = d.du_l2;
    c.lambda1 = std::sqrt(2.0) * std::pow(D1, 0.25) *
                std::sqrt(a2 + a3 * std::sqrt(M) * std::sqrt(D1)) *
                std::pow(d.d2u_l2 * d.d2u_l2 + a3 * std::pow(d.du_l6, 6.0), 0.125);
    c.lambda2 = 729.0 * 2.0 * C_K * C_K * C_K * M * M / (a2 * std::pow(d.linf, 3.0));

    c.m0 = std::abs(d.inf_dfu);
    const double om = 1.0 - theta;
    c.threshold = std::max({(a3 + 6.0 * C_G + 1.0) / (1.0 - 8.0 * theta),
                            c.lambda1 / std::sqrt(theta), c.lambda2 * theta / (om * om * om)});
    c.satisfied = c.m0 > c.threshold;
    if (c.satisfied) {
        c.T_lo = 1.0 / ((1.0 + theta) * c.m0);
        c.T_hi = 1.0 / ((1.0 - theta) * c.m0);
    }
    return c;
}

BoundSystemTrace integrate_bound_system(const std::vector<double>& times,
                                        const std::vector<double>& m_series,
                                        const BoundSystemInputs& in, BoundVariant variant) {
    if (times.size() != m_series.size() || times.size() < 2)
        throw std::invalid_argument("integrate_bound_system: bad series");

    const double M = in.M, G = in.Gamma, p = in.p;
    const double ga1 = std::sqrt(2.0) * in.f2_at_0;
    const double ga2 = 4.0 * G * std::sqrt(M);
    const double ga3 = (p + 2.0) / (p + 1.0) * std::pow(2.0, 1.0 + 0.5 * p) *
                       std::pow(M, 0.5 * (p + 1.0));

    BoundSystemTrace tr;
    auto push = [&](double t, double z1, double z6, double z2t) {
        tr.t.push_back(t);
        tr.z1.push_back(z1);
        tr.z6.push_back(z6);
        tr.z2_tilde.push_back(z2t);
        if (variant == BoundVariant::growth) {
            const double Z1 = z1 * z2t;
            const double Z2 =
                2.0 * z1 * z6 + std::pow(2.0, p + 1.0) * std::pow(M, p) *
                                    std::pow(z1, 1.0 + 0.5 * p) * z6;
            tr.Z1.push_back(Z1);
            tr.Z2.push_back(Z2);
            tr.Z.push_back(std::pow(Z1 + G * Z2, 0.25) *
                           (ga1 + ga2 * std::pow(z1, 0.25) +
                            G * ga3 * std::pow(z1, 0.25 * (p + 1.0))));
        } else {
            const double Z1 = z1 * z2t;
            const double Z2 = z1 * z6;
            tr.Z1.push_back(Z1);
            tr.Z2.push_back(Z2);
            tr.Z.push_back(std::pow(Z1 + in.alpha3 * Z2, 0.25) *
                           (std::sqrt(2.0) * in.alpha2 +
                            2.0 * in.alpha3 * std::sqrt(M) * std::pow(z1, 0.25)));
        }
    };

    double z1 = in.du_l2_sq, z6 = in.du_l6_p6, z2t = in.d2u_l2_sq;
    push(times[0], z1, z6, z2t);
    tr.valid_count = 1;

    auto deriv = [&](double m, double y1, double y6, double y2t, double& d1, double& d6,
                     double& d2t) {
        d1 = m * y1;
        d6 = (5.0 * m + 6.0 * in.C_G) * y6;
        if (variant == BoundVariant::growth) {
            d2t = (5.0 * m + G) * y2t +
                  G * (2.0 + std::pow(2.0, p + 1.0) * std::pow(M, p) * std::pow(y1, 0.5 * p)) *
                      y6;
        } else {
            d2t = (5.0 * m + in.alpha3) * y2t + in.alpha3 * y6;
        }
    };

    for (size_t i = 0; i + 1 < times.size(); ++i) {
        const double h = times[i + 1] - times[i];
        const double m0 = m_series[i], m1 = m_series[i + 1], mh = 0.5 * (m0 + m1);
        double a1, a6, a2t, b1, b6, b2t, c1, c6, c2t, d1, d6, d2t;
        deriv(m0, z1, z6, z2t, a1, a6, a2t);
        deriv(mh, z1 + 0.5 * h * a1, z6 + 0.5 * h * a6, z2t + 0.5 * h * a2t, b1, b6, b2t);
        deriv(mh, z1 + 0.5 * h * b1, z6 + 0.5 * h * b6, z2t + 0.5 * h * b2t, c1, c6, c2t);
        deriv(m1, z1 + h * c1, z6 + h * c6, z2t + h * c2t, d1, d6, d2t);
        z1 += h / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + d1);
        z6 += h / 6.0 * (a6 + 2.0 * b6 + 2.0 * c6 + d6);
        z2t += h / 6.0 * (a2t + 2.0 * b2t + 2.0 * c2t + d2t);
        if (!(z1 < 1e280 && z6 < 1e280 && z2t < 1e280)) {
            tr.overflowed = true;  // bounds blow up before the solution does
            break;
        }
        push(times[i + 1], z1, z6, z2t);
        ++tr.valid_count;
    }
    return tr;
}

DominationReport check_domination(const BoundSystemTrace& trace,
                                  const std::vector<double>& times,
                                  const std::vector<double>& ux_l2_sq,
                                  const std::vector<double>& uxx_l2_sq,
                                  const std::vector<double>& ux_l6_p6, double t_limit,
                                  double tol) {
    DominationReport rep;
    for (size_t i = 0; i < trace.valid_count && i < times.size(); ++i) {
        if (times[i] > t_limit) break;
        if (std::abs(times[i] - trace.t[i]) > 1e-12)
            throw std::invalid_argument("check_domination: time mesh mismatch");
        const double e1 = ux_l2_sq[i] / trace.z1[i] - 1.0;
        const double e2 = uxx_l2_sq[i] / trace.z2_tilde[i] - 1.0;
        const double e6 = ux_l6_p6[i] / trace.z6[i] - 1.0;
        rep.worst_excess = std::max({rep.worst_excess, e1, e2, e6});
        ++rep.checked;
    }
    rep.dominated = rep.worst_excess <= tol;
    return rep;
}

namespace {

double interp_periodic(const GridFunction& g, const std::vector<double>& field, double x) {
    const double P = g.half_extent();
    double s = (x + P) / g.dx();
    const int n = g.n();
    s -= std::floor(s / n) * n;
    const int i = static_cast<int>(s) % n;
    const double f = s - std::floor(s);
    return (1.0 - f) * field[i] + f * field[(i + 1) % n];
}

}  // namespace

WCharacteristics w_along_characteristics(const SmoothTrajectory& traj, const Flux& flux,
                                         const std::vector<double>& betas,
                                         const std::vector<double>& Z_times,
                                         const std::vector<double>& Z_series) {
    const size_t S = traj.snapshots.size();
    if (S < 3) throw std::invalid_argument("w_along_characteristics: too few snapshots");
    const GridFunction& proto = traj.snapshots.front();
    const int n = proto.n();

    // Per-snapshot characteristic speed and its slope.
    std::vector<std::vector<double>> speed(S), slope(S);
    for (size_t s = 0; s < S; ++s) {
        const GridFunction& u = traj.snapshots[s];
        const GridFunction ux = derivative(u, 1, DerivMethod::spectral);
        speed[s].resize(n);
        slope[s].resize(n);
        for (int i = 0; i < n; ++i) {
            speed[s][i] = flux.df(u[i]);
            slope[s][i] = flux.d2f(u[i]) * ux[i];
        }
    }

    WCharacteristics out;
    out.times = traj.snap_times;
    out.dropped.assign(betas.size(), false);
    out.w.resize(betas.size());

    for (size_t b = 0; b < betas.size(); ++b) {
        double x = betas[b];
        out.w[b].resize(S);
        out.w[b][0] = -interp_periodic(proto, slope[0], x);
        for (size_t s = 0; s + 1 < S; ++s) {
            const double h = traj.snap_times[s + 1] - traj.snap_times[s];
            // Midpoint rule with the two bracketing speed fields.
            const double v0 = interp_periodic(proto, speed[s], x);
            const double xm = x + 0.5 * h * v0;
            const double vm = 0.5 * (interp_periodic(proto, speed[s], xm) +
                                     interp_periodic(proto, speed[s + 1], xm));
            x += h * vm;
            out.w[b][s + 1] = -interp_periodic(proto, slope[s + 1], x);
        }
    }

    auto Z_at = [&](double t) -> double {
        if (Z_times.empty()) return std::numeric_limits<double>::infinity();
        const auto it = std::lower_bound(Z_times.begin(), Z_times.end(), t);
        size_t j = static_cast<size_t>(it - Z_times.begin());
        if (j == 0) return Z_series.front();
        if (j >= Z_times.size()) return Z_series.back();
        const double f = (t - Z_times[j - 1]) / (Z_times[j] - Z_times[j - 1]);
        return (1.0 - f) * Z_series[j - 1] + f * Z_series[j];
    };

    double max_resid = 0.0, max_excess = -std::numeric_limits<double>::infinity();
    for (size_t b = 0; b < betas.size(); ++b) {
        for (size_t s = 1; s + 1 < S; ++s) {
            const double dt = traj.snap_times[s + 1] - traj.snap_times[s - 1];
            const double wdot = (out.w[b][s + 1] - out.w[b][s - 1]) / dt;
            const double r = std::abs(wdot - out.w[b][s] * out.w[b][s]);
            max_resid = std::max(max_resid, r);
            max_excess = std::max(max_excess, r - Z_at(traj.snap_times[s]));
        }
    }
    out.max_residual = max_resid;
    out.max_residual_minus_Z = max_excess;

    // sup over feet against the recorded m(t).
    double worst_rel = 0.0;
    for (size_t s = 0; s < S; ++s) {
        double sup_w = -std::numeric_limits<double>::infinity();
        for (size_t b = 0; b < betas.size(); ++b) sup_w = std::max(sup_w, out.w[b][s]);
        // m on the fine mesh at the snapshot time
        const auto it = std::lower_bound(traj.times.begin(), traj.times.end(),
                                         traj.snap_times[s] - 1e-14);
        const size_t j = std::min(static_cast<size_t>(it - traj.times.begin()),
                                  traj.times.size() - 1);
        const double m = traj.m[j];
        if (m > 1e-10) worst_rel = std::max(worst_rel, std::abs(sup_w - m) / m);
    }
    out.sup_w_vs_m_max_relerr = worst_rel;
    return out;
}

bool breaking_set_membership(const GridFunction& v, const Flux& flux, double T, double C_G) {
    if (!flux.has_third_derivative_growth())
        throw std::invalid_argument("breaking_set_membership: flux has no f''' growth data");
    const DataNorms d = data_norms(v, flux);
    BreakingCriterion c;
    c.Gamma = flux.Gamma();
    c.p = flux.p_growth();
    c.f2_at_0 = flux.f2_at_0();
    c.l2 = d.l2;
    c.du_l2 = d.du_l2;
    c.d2u_l2 = d.d2u_l2;
    c.du_l6 = d.du_l6;
    fill_growth_constants(c);
    const double m0 = std::abs(d.inf_dfu);
    const double thr =
        std::max({(1.0 + 6.0 * C_G + c.Gamma) / (4.0 * c.theta_p),
                  std::sqrt(2.0) * c.eta / std::sqrt(c.theta_p),
                  2.0 / ((2.0 - c.theta_p) * T)});
    return m0 > thr;
}

namespace {

const char* criterion_name(CriterionKind k) {
    switch (k) {
        case CriterionKind::quadratic: return "quadratic";
        case CriterionKind::growth: return "growth";
        case CriterionKind::general: return "general";
    }
    return "?";
}

void kv(std::ostream& os, int indent, const char* key, double v) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%*s%s = %.12g\n", indent, "", key, v);
    os << buf;
}

}  // namespace

void BreakingReport::write(std::ostream& os) const {
    os << "breaking_report {\n";
    os << "  criterion {\n";
    os << "    theorem = " << criterion_name(criterion.theorem) << "\n";
    kv(os, 4, "theta", criterion.theta);
    if (criterion.theorem == CriterionKind::quadratic) kv(os, 4, "a", criterion.a);
    if (criterion.theorem == CriterionKind::growth) {
        kv(os, 4, "Gamma", criterion.Gamma);
        kv(os, 4, "p", criterion.p);
        kv(os, 4, "C_G", criterion.C_G);
        kv(os, 4, "theta_p", criterion.theta_p);
        kv(os, 4, "eta1", criterion.eta1);
        kv(os, 4, "eta2", criterion.eta2);
        kv(os, 4, "eta", criterion.eta);
    }
    if (criterion.theorem == CriterionKind::general) {
        kv(os, 4, "C_K", criterion.C_K);
        kv(os, 4, "C_G", criterion.C_G);
        kv(os, 4, "alpha1", criterion.alpha1);
        kv(os, 4, "alpha2", criterion.alpha2);
        kv(os, 4, "alpha3", criterion.alpha3);
        kv(os, 4, "lambda1", criterion.lambda1);
        kv(os, 4, "lambda2", criterion.lambda2);
    }
    kv(os, 4, "norm_l2", criterion.l2);
    kv(os, 4, "norm_du_l2", criterion.du_l2);
    kv(os, 4, "norm_d2u_l2", criterion.d2u_l2);
    kv(os, 4, "norm_du_l6", criterion.du_l6);
    kv(os, 4, "norm_linf", criterion.linf);
    kv(os, 4, "inf_du", criterion.inf_du);
    kv(os, 4, "inf_dfu", criterion.inf_dfu);
    kv(os, 4, "m0", criterion.m0);
    kv(os, 4, "threshold", criterion.threshold);
    os << "    satisfied = " << (criterion.satisfied ? "true" : "false") << "\n";
    kv(os, 4, "T_lo", criterion.T_lo);
    kv(os, 4, "T_hi", criterion.T_hi);
    os << "  }\n";
    if (observed_Tstar) {
        kv(os, 2, "observed_Tstar", *observed_Tstar);
    } else {
        os << "  observed_Tstar = none\n";
    }
    os << "  extrapolation_fit {\n";
    kv(os, 4, "slope", extrapolation_fit.slope);
    kv(os, 4, "intercept", extrapolation_fit.intercept);
    kv(os, 4, "residual", extrapolation_fit.residual);
    os << "  }\n";
    os << "  inside_bracket = " << (inside_bracket ? "true" : "false") << "\n";
    os << "  trace_points = " << trace.valid_count << "\n";
    os << "  trace_overflowed = " << (trace.overflowed ? "true" : "false") << "\n";
    if (!domain_note.empty()) os << "  domain_note = " << domain_note << "\n";
    os << "}\n";
}

}  // namespace bhlab
