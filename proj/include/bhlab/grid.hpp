#ifndef BHLAB_GRID_HPP
#define BHLAB_GRID_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace bhlab {

enum class DomainKind { periodic, line };

/** A real-valued function sampled on a uniform 1-D grid.
 *
 *  Periodic domains cover [-P, P) with n samples at x_i = -P + i*dx and
 *  n*dx == 2P exactly.  Truncated-line domains cover [-L, L] with n cell
 *  centers at x_i = -L + (i+1/2)*dx and n*dx == 2L; values outside are
 *  taken to be zero (compact-support convention).
 *
 *  Instances are immutable values: every operation returns a fresh
 *  function, so they are safe to share across worker threads. */
class GridFunction {
  public:
    static GridFunction periodic(double half_period, int n);
    static GridFunction periodic(double half_period, int n,
                                 const std::function<double(double)>& f);
    static GridFunction line(double half_width, int n);
    static GridFunction line(double half_width, int n,
                             const std::function<double(double)>& f);
    static GridFunction like(const GridFunction& g, std::vector<double> values);

    DomainKind domain() const { return domain_; }
    int n() const { return n_; }
    double dx() const { return dx_; }
    /// P for periodic domains, L for line domains.
    double half_extent() const { return half_extent_; }
    double x(int i) const { return x0_ + i * dx_; }
    double operator[](int i) const { return values_[i]; }
    const std::vector<double>& values() const { return values_; }

    /// Sample with the domain convention: periodic wrap / zero outside.
    double value_at_index(long long i) const;

    bool same_grid(const GridFunction& other) const;

    /// Largest |value| within max(|x|) > threshold*half_extent band; used to
    /// warn when truncated-line data is not compactly concentrated.
    double boundary_magnitude() const;

    void write(std::ostream& os) const;
    void write_file(const std::string& path) const;
    static GridFunction read(std::istream& is);
    static GridFunction read_file(const std::string& path);

  private:
    GridFunction(DomainKind d, double half_extent, int n, std::vector<double> v);

    DomainKind domain_;
    int n_;
    double dx_;
    double x0_;
    double half_extent_;
    std::vector<double> values_;
};

/// Discrete L^p norm; p must be one of 1, 2, 6 or infinity
/// (pass norm_inf).  (sum |v|^p dx)^(1/p) for finite p, max |v| otherwise.
inline constexpr double norm_inf = 0.0;  // sentinel accepted by norm()
double norm(const GridFunction& g, double p);

double mean(const GridFunction& g);
double inner_product(const GridFunction& a, const GridFunction& b);

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double s, const GridFunction& a);

enum class DerivMethod { spectral, central_difference };

/// Derivative of order 1 or 2.  The spectral method requires a periodic
/// domain and is exact on resolved trigonometric modes; central differences
/// fall back to one-sided stencils at line-domain boundaries.
GridFunction derivative(const GridFunction& g, int order, DerivMethod method);

/** Exact fractional gamma-total variation of g over [a,b]:
 *  sup over partitions by grid points of sum |g(x_i)-g(x_{i-1})|^{1/gamma}.
 *  For exponent 1/gamma >= 1 the supremum is attained on a subsequence of
 *  local extrema, so it is computed by an O(k^2) dynamic program over the
 *  k extrema. */
double fractional_tv(const GridFunction& g, double gamma, double a, double b);

/// Brute-force partition enumeration, exponential in the number of samples;
/// test oracle for fractional_tv on short windows.
double fractional_tv_bruteforce(const GridFunction& g, double gamma, double a, double b);

}  // namespace bhlab

#endif
