#ifndef BHLAB_KERNELS_HPP
#define BHLAB_KERNELS_HPP

#include "bhlab/grid.hpp"

#include <string>
#include <vector>

namespace bhlab {

enum class KernelKind { zero, hilbert, periodic_hilbert, l1_singular, tabulated };

/** An odd singular convolution kernel together with its structural
 *  constants: the singularity envelope C_K (|K(x)| <= C_K/|x| and
 *  |K'(x)| <= C_K/x^2), the L^1 bound L_K when the kernel is integrable,
 *  the half-period P for periodic kinds, and the L^2 -> L^2 operator norm
 *  of the principal-value convolution.
 *
 *  Built-ins:
 *    hilbert            K(x) = 1/(pi x)
 *    periodic_hilbert   K(x) = cot(pi x / (2P)) / (2P)
 *    l1_singular        K(x) = sign(x) / (sqrt|x| (1+x^2))
 *
 *  Kernels are immutable after construction; the apply operations are
 *  reentrant. */
class Kernel {
  public:
    static Kernel zero();
    static Kernel hilbert();
    static Kernel periodic_hilbert(double half_period);
    static Kernel l1_singular();
    /// Two-column text (x, K(x)) for x > 0 only; oddness supplies x < 0.
    static Kernel tabulated_from_file(const std::string& path);

    KernelKind kind() const { return kind_; }
    double C_K() const { return C_K_; }
    double L_K() const { return L_K_; }
    double P() const { return P_; }
    double G_op_norm() const { return G_op_norm_; }

    /// Kernel value at x != 0 (throws at the singularity).
    double eval(double x) const;

    /// Sampled assertion of the structural bounds on a test mesh; throws on
    /// violation.  Called by the factories.
    void validate() const;

  private:
    Kernel() = default;
    KernelKind kind_ = KernelKind::zero;
    double C_K_ = 0.0;
    double L_K_ = 0.0;
    double P_ = 0.0;
    double G_op_norm_ = 0.0;
    std::vector<double> tab_x_, tab_k_;  // tabulated kind only
};

inline double eval_kernel(const Kernel& k, double x) { return k.eval(x); }

enum class PvMethod { pair_quadrature, spectral };

/** Principal-value convolution G[g].  The spectral method requires a
 *  periodic domain and a Hilbert-type kernel (Fourier multiplier
 *  -i sign(m) per mode).  Pair quadrature works for any odd kernel:
 *    G[g](x_i) ~ sum_{j>=1} K(j dx) (g(x_i - j dx) - g(x_i + j dx)) dx,
 *  which realizes the principal value by symmetric cancellation and skips
 *  the singular cell.  On line domains the kernel tail is truncated at the
 *  domain half-width; see line_truncation_error. */
GridFunction apply_pv(const Kernel& k, const GridFunction& g, PvMethod method);

/// Reported error scale C_K ||g||_L2 / sqrt(L) induced by truncating a
/// line-domain convolution at the half-width L.
double line_truncation_error(const Kernel& k, const GridFunction& g);

/// Periodic principal-value convolution by pair quadrature over one period.
/// Requires a periodic kernel and a grid with matching period.
GridFunction apply_periodic(const Kernel& k, const GridFunction& g);

struct CheckPair {
    double measured = 0.0;
    double bound = 0.0;
    bool holds() const { return measured <= bound; }
};

/** Tail-energy estimate for g supported in [-r, r]:
 *    measured = ||G[g]||_{L^2 outside [-r-kappa, r+kappa]}
 *    bound    = 2 C_K ||g||_{L^2} sqrt(r/kappa). */
CheckPair tail_energy_check(const Kernel& k, const GridFunction& g, double r, double kappa);

/** L^1 bound on the periodic convolution of a zero-mean w of bounded
 *  variation beta_w:
 *    bound = C_K ||w||_1 (2 + 3 ln 2 + 2 ln P + 2 ln beta_w - 2 ln ||w||_1).
 *  Throws when the mean of w exceeds 1e-10. */
CheckPair periodic_l1_bound_check(const Kernel& k, const GridFunction& w);

/// Indicator variant: measured = ||G_per[chi_[a,b]]||_1 on an n-point grid,
/// bound = C_K (b-a) (2 + 5 ln 2 + 2 ln P - 2 ln(b-a)).
CheckPair periodic_indicator_l1_check(const Kernel& k, double a, double b, int n);

/** Empirical L^6 -> L^6 operator constant: maximum of
 *  ||G[g]||_6 / ||g||_6 over a battery of periodic test functions, with
 *  25% headroom. */
double measure_l6_bound_constant(const Kernel& k, double half_period, int n,
                                 unsigned long long seed, int battery_size = 24);

}  // namespace bhlab

#endif
