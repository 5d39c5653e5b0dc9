#pragma once

/**
 * @file math_kernel.hpp
 * @brief Special functions and adaptive quadrature for the SEP machinery.
 *
 * Everything here is pure and reentrant. Nothing in this header knows about
 * beamforming; it only supplies the numerical primitives the analytic
 * operations are built from:
 *
 *   - J1(x), Bessel function of the first kind, order one
 *   - Erlang(k, theta) density, distribution and quantile (integer shape)
 *   - exact binomial coefficients up to n = 64
 *   - globally adaptive Gauss-Kronrod (7/15) integration on finite intervals
 */

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>

namespace cobeam {

/// Tolerances and refinement budget for integrate_1d.
struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 200;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int subdivisions = 0;
    bool converged = false;
};

/// Raised when the subdivision budget runs out before the tolerance is met.
/// The best estimate so far travels with the exception.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, QuadratureResult partial)
        : std::runtime_error(what), partial_(partial) {}

    const QuadratureResult& partial() const noexcept { return partial_; }

private:
    QuadratureResult partial_;
};

using RealFunction = std::function<double(double)>;

/// J1(x) with absolute error below 1e-12 for |x| <= 50.
double bessel_j1(double x);

/// 2 J1(a) / a, with the removable singularity at a = 0 filled in.
double jinc(double a);

double erlang_pdf(double x, int k, double theta);

/// Regularized lower incomplete gamma P(k, x/theta) for integer k.
double erlang_cdf(double x, int k, double theta);

/// Upper tail Q(k, x/theta) = 1 - erlang_cdf, computed without cancellation.
double erlang_sf(double x, int k, double theta);

/// x such that erlang_cdf(x, k, theta) = p. Upper-tail probabilities are
/// solved against erlang_sf so p close to 1 keeps full accuracy.
double erlang_quantile(double p, int k, double theta);

/// Exact C(n, k) for 0 <= k <= n <= 64. Throws std::overflow_error beyond.
std::uint64_t binomial(int n, int k);

/// Globally adaptive Gauss-Kronrod on [a, b]. Never throws on
/// non-convergence; check result.converged.
QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b,
                                    const QuadratureSpec& spec = {});

/// Same, starting from the panels between consecutive breakpoints (strictly
/// increasing, at least two). Each panel counts as one subdivision.
QuadratureResult integrate_adaptive(const RealFunction& f, std::span<const double> breakpoints,
                                    const QuadratureSpec& spec = {});

/// As integrate_adaptive, but throws NonConvergenceError when the budget is
/// exhausted.
double integrate_1d(const RealFunction& f, double a, double b,
                    const QuadratureSpec& spec = {});

}  // namespace cobeam
