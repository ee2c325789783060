#include "bhlab/grid.hpp"

#include "bhlab/fft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace bhlab {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

GridFunction::GridFunction(DomainKind d, double half_extent, int n, std::vector<double> v)
    : domain_(d), n_(n), half_extent_(half_extent), values_(std::move(v)) {
    require(n_ >= 4, "GridFunction: n must be >= 4");
    require(half_extent_ > 0.0, "GridFunction: domain half-extent must be positive");
    require(static_cast<int>(values_.size()) == n_, "GridFunction: value count mismatch");
    require(all_finite(values_), "GridFunction: values must be finite");
    dx_ = 2.0 * half_extent_ / n_;
    x0_ = (domain_ == DomainKind::periodic) ? -half_extent_ : -half_extent_ + 0.5 * dx_;
}

GridFunction GridFunction::periodic(double half_period, int n) {
    return GridFunction(DomainKind::periodic, half_period, n, std::vector<double>(n, 0.0));
}

GridFunction GridFunction::periodic(double half_period, int n,
                                    const std::function<double(double)>& f) {
    GridFunction g = periodic(half_period, n);
    for (int i = 0; i < n; ++i) g.values_[i] = f(g.x(i));
    require(all_finite(g.values_), "GridFunction: values must be finite");
    return g;
}

GridFunction GridFunction::line(double half_width, int n) {
    return GridFunction(DomainKind::line, half_width, n, std::vector<double>(n, 0.0));
}

GridFunction GridFunction::line(double half_width, int n,
                                const std::function<double(double)>& f) {
    GridFunction g = line(half_width, n);
    for (int i = 0; i < n; ++i) g.values_[i] = f(g.x(i));
    require(all_finite(g.values_), "GridFunction: values must be finite");
    return g;
}

GridFunction GridFunction::like(const GridFunction& g, std::vector<double> values) {
    return GridFunction(g.domain_, g.half_extent_, g.n_, std::move(values));
}

double GridFunction::value_at_index(long long i) const {
    if (domain_ == DomainKind::periodic) {
        long long m = i % n_;
        if (m < 0) m += n_;
        return values_[static_cast<int>(m)];
    }
    if (i < 0 || i >= n_) return 0.0;
    return values_[static_cast<int>(i)];
}

bool GridFunction::same_grid(const GridFunction& other) const {
    return domain_ == other.domain_ && n_ == other.n_ &&
           std::abs(half_extent_ - other.half_extent_) < 1e-12 * half_extent_;
}

double GridFunction::boundary_magnitude() const {
    double m = 0.0;
    const int band = std::max(1, n_ / 50);
    for (int i = 0; i < band; ++i) {
        m = std::max(m, std::abs(values_[i]));
        m = std::max(m, std::abs(values_[n_ - 1 - i]));
    }
    return m;
}

void GridFunction::write(std::ostream& os) const {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "# domain=%s n=%d dx=%.17g\n",
                  domain_ == DomainKind::periodic ? "periodic" : "line", n_, dx_);
    os << buf;
    for (int i = 0; i < n_; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", x(i), values_[i]);
        os << buf;
    }
}

void GridFunction::write_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write(os);
}

GridFunction GridFunction::read(std::istream& is) {
    std::string header;
    std::getline(is, header);
    char kind[32];
    int n = 0;
    double dx = 0.0;
    if (std::sscanf(header.c_str(), "# domain=%31s n=%d dx=%lg", kind, &n, &dx) != 3)
        throw std::runtime_error("GridFunction::read: bad header: " + header);
    const std::string k(kind);
    require(k == "periodic" || k == "line", "GridFunction::read: unknown domain kind");
    require(n >= 4 && dx > 0.0, "GridFunction::read: bad n or dx");
    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) {
        double x, v;
        if (!(is >> x >> v)) throw std::runtime_error("GridFunction::read: truncated data");
        values[i] = v;
    }
    const double half = 0.5 * n * dx;
    return GridFunction(k == "periodic" ? DomainKind::periodic : DomainKind::line,
                        half, n, std::move(values));
}

GridFunction GridFunction::read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read(is);
}

double norm(const GridFunction& g, double p) {
    const auto& v = g.values();
    if (p == norm_inf) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    if (p != 1.0 && p != 2.0 && p != 6.0)
        throw std::invalid_argument("norm: p must be 1, 2, 6 or norm_inf");
    double s = 0.0;
    if (p == 1.0) {
        for (double x : v) s += std::abs(x);
    } else if (p == 2.0) {
        for (double x : v) s += x * x;
    } else {
        for (double x : v) {
            const double x2 = x * x;
            s += x2 * x2 * x2;
        }
    }
    return std::pow(s * g.dx(), 1.0 / p);
}

double mean(const GridFunction& g) {
    double s = 0.0;
    for (double x : g.values()) s += x;
    return s / g.n();
}

double inner_product(const GridFunction& a, const GridFunction& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("inner_product: grid mismatch");
    double s = 0.0;
    for (int i = 0; i < a.n(); ++i) s += a[i] * b[i];
    return s * a.dx();
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("GridFunction +: grid mismatch");
    std::vector<double> v(a.values());
    for (int i = 0; i < a.n(); ++i) v[i] += b[i];
    return GridFunction::like(a, std::move(v));
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("GridFunction -: grid mismatch");
    std::vector<double> v(a.values());
    for (int i = 0; i < a.n(); ++i) v[i] -= b[i];
    return GridFunction::like(a, std::move(v));
}

GridFunction operator*(double s, const GridFunction& a) {
    std::vector<double> v(a.values());
    for (double& x : v) x *= s;
    return GridFunction::like(a, std::move(v));
}

namespace {

GridFunction spectral_derivative(const GridFunction& g, int order) {
    const int n = g.n();
    auto spec = fft_forward(g.values());
    const double k0 = M_PI / g.half_extent();  // wavenumber of mode 1
    for (int m = 0; m < static_cast<int>(spec.size()); ++m) {
        const double k = k0 * m;
        if (order == 1) {
            spec[m] *= std::complex<double>(0.0, k);
        } else {
            spec[m] *= -k * k;
        }
    }
    // The Nyquist mode of an odd-order derivative has no real representation.
    if (order == 1 && n % 2 == 0) spec[n / 2] = 0.0;
    return GridFunction::like(g, fft_inverse(spec, n));
}

GridFunction central_derivative(const GridFunction& g, int order) {
    const int n = g.n();
    const double dx = g.dx();
    std::vector<double> out(n);
    if (g.domain() == DomainKind::periodic) {
        for (int i = 0; i < n; ++i) {
            const double gm = g.value_at_index(i - 1), gp = g.value_at_index(i + 1);
            out[i] = (order == 1) ? (gp - gm) / (2.0 * dx)
                                  : (gp - 2.0 * g[i] + gm) / (dx * dx);
        }
        return GridFunction::like(g, std::move(out));
    }
    // Line domain: one-sided second-order stencils at the edges.
    for (int i = 1; i + 1 < n; ++i) {
        out[i] = (order == 1) ? (g[i + 1] - g[i - 1]) / (2.0 * dx)
                              : (g[i + 1] - 2.0 * g[i] + g[i - 1]) / (dx * dx);
    }
    if (order == 1) {
        out[0] = (-1.5 * g[0] + 2.0 * g[1] - 0.5 * g[2]) / dx;
        out[n - 1] = (1.5 * g[n - 1] - 2.0 * g[n - 2] + 0.5 * g[n - 3]) / dx;
    } else {
        out[0] = (2.0 * g[0] - 5.0 * g[1] + 4.0 * g[2] - g[3]) / (dx * dx);
        out[n - 1] = (2.0 * g[n - 1] - 5.0 * g[n - 2] + 4.0 * g[n - 3] - g[n - 4]) / (dx * dx);
    }
    return GridFunction::like(g, std::move(out));
}

}  // namespace

GridFunction derivative(const GridFunction& g, int order, DerivMethod method) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("derivative: order must be 1 or 2");
    if (method == DerivMethod::spectral) {
        if (g.domain() != DomainKind::periodic)
            throw std::invalid_argument("derivative: spectral method requires a periodic domain");
        return spectral_derivative(g, order);
    }
    return central_derivative(g, order);
}

namespace {

// Index window [lo, hi] of samples inside [a, b].
std::pair<int, int> window(const GridFunction& g, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("fractional_tv: need a < b");
    const double left = g.x(0), right = g.x(g.n() - 1);
    const double eps = 1e-9 * g.dx();
    if (a < left - g.dx() - eps || b > right + g.dx() + eps)
        throw std::invalid_argument("fractional_tv: [a,b] outside the grid domain");
    int lo = static_cast<int>(std::ceil((a - left) / g.dx() - 1e-9));
    int hi = static_cast<int>(std::floor((b - left) / g.dx() + 1e-9));
    lo = std::max(lo, 0);
    hi = std::min(hi, g.n() - 1);
    if (hi - lo < 1) throw std::invalid_argument("fractional_tv: window holds fewer than 2 samples");
    return {lo, hi};
}

// Sequence of local extrema of v (first and last entries always kept).
std::vector<double> extrema_sequence(const std::vector<double>& v) {
    std::vector<double> e;
    e.push_back(v.front());
    for (size_t i = 1; i + 1 < v.size(); ++i) {
        const double dl = v[i] - e.back();
        const double dr = v[i + 1] - v[i];
        if ((dl > 0 && dr < 0) || (dl < 0 && dr > 0)) e.push_back(v[i]);
    }
    e.push_back(v.back());
    return e;
}

}  // namespace

double fractional_tv(const GridFunction& g, double gamma, double a, double b) {
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("fractional_tv: gamma must be in (0,1]");
    auto [lo, hi] = window(g, a, b);
    std::vector<double> v(g.values().begin() + lo, g.values().begin() + hi + 1);
    const double q = 1.0 / gamma;

    std::vector<double> e = extrema_sequence(v);
    const size_t k = e.size();
    if (k < 2) return 0.0;

    // best[j]: maximal sum over subsequences starting at extremum 0 and
    // ending at extremum j.  The endpoints are pinned: partitions in the
    // definition run from a to b.
    std::vector<double> best(k, 0.0);
    for (size_t j = 1; j < k; ++j) {
        double m = 0.0;
        for (size_t i = 0; i < j; ++i) {
            const double inc = std::pow(std::abs(e[j] - e[i]), q);
            m = std::max(m, best[i] + inc);
        }
        best[j] = m;
    }
    return best[k - 1];
}

double fractional_tv_bruteforce(const GridFunction& g, double gamma, double a, double b) {
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("fractional_tv_bruteforce: gamma must be in (0,1]");
    auto [lo, hi] = window(g, a, b);
    const int m = hi - lo + 1;
    if (m > 22) throw std::invalid_argument("fractional_tv_bruteforce: window too large");
    const double q = 1.0 / gamma;
    const int interior = m - 2;
    double best = 0.0;
    for (unsigned mask = 0; mask < (1u << interior); ++mask) {
        double sum = 0.0, prev = g[lo];
        for (int i = 0; i < interior; ++i) {
            if (mask & (1u << i)) {
                const double cur = g[lo + 1 + i];
                sum += std::pow(std::abs(cur - prev), q);
                prev = cur;
            }
        }
        sum += std::pow(std::abs(g[hi] - prev), q);
        best = std::max(best, sum);
    }
    return best;
}

}  // namespace bhlab
