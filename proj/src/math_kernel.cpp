#include "cobeam/math_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

namespace cobeam {

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
    }
    if (max_subdivisions < 1) {
        throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
    }
}

// ---------------------------------------------------------------------------
// Bessel J1
// ---------------------------------------------------------------------------

namespace {

double j1_series(double x) {
    const double h = 0.5 * x;
    const double h2 = h * h;
    double term = h;
    double sum = term;
    for (int k = 1; k < 64; ++k) {
        term *= -h2 / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// Backward recurrence normalised by J0 + 2 (J2 + J4 + ...) = 1. x > 0.
double j1_miller(double x) {
    const int start = 2 * ((static_cast<int>(x) + 44) / 2);
    const double two_over_x = 2.0 / x;
    double j_next = 0.0;
    double j = 1e-300;
    double norm = 0.0;
    double j1 = 0.0;
    for (int n = start; n > 0; --n) {
        const double j_prev = n * two_over_x * j - j_next;
        j_next = j;
        j = j_prev;  // J_{n-1}
        const int order = n - 1;
        if (order == 1) j1 = j;
        if (order > 0 && order % 2 == 0) norm += 2.0 * j;
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
    }
    norm += j;
    return j1 / norm;
}

// Hankel expansion, x >= 25 so the smallest term is far below 1e-16.
double j1_asymptotic(double x) {
    constexpr double mu = 4.0;  // 4 nu^2
    double p = 1.0;
    double q = 0.0;
    double a = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        a *= (mu - odd * odd) / (k * 8.0 * x);
        const double mag = std::abs(a);
        if (mag > prev) break;
        prev = mag;
        // P collects even k with alternating sign, Q the odd ones.
        switch (k % 4) {
            case 1: q += a; break;
            case 2: p -= a; break;
            case 3: q -= a; break;
            default: p += a; break;
        }
        if (mag < 1e-18) break;
    }
    const double chi = x - 0.75 * std::numbers::pi;
    return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j1(double x) {
    const double ax = std::abs(x);
    double v;
    if (ax < 8.0) {
        return j1_series(x);
    } else if (ax < 25.0) {
        v = j1_miller(ax);
    } else {
        v = j1_asymptotic(ax);
    }
    return x < 0.0 ? -v : v;
}

double jinc(double a) {
    if (std::abs(a) < 1e-4) {
        return 1.0 - a * a / 8.0;
    }
    return 2.0 * bessel_j1(a) / a;
}

// ---------------------------------------------------------------------------
// Erlang distribution
// ---------------------------------------------------------------------------

namespace {

void check_erlang(int k, double theta) {
    if (k < 1) throw std::domain_error("Erlang shape k must be >= 1");
    if (!(theta > 0.0)) throw std::domain_error("Erlang scale theta must be > 0");
}

// Lower regularized gamma by its power series; accurate for y < k + 1.
double lower_series(int k, double y) {
    const double lead = std::exp(k * std::log(y) - y - std::lgamma(k + 1.0));
    double term = 1.0;
    double sum = 1.0;
    for (int i = 1; i < 100000; ++i) {
        term *= y / (k + i);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return lead * sum;
}

// Upper regularized gamma as the finite Poisson sum, integer k.
double upper_poisson(int k, double y) {
    const double log_y = std::log(y);
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
        sum += std::exp(j * log_y - y - std::lgamma(j + 1.0));
    }
    return sum;
}

}  // namespace

double erlang_pdf(double x, int k, double theta) {
    check_erlang(k, theta);
    if (x < 0.0) return 0.0;
    if (x == 0.0) return k == 1 ? 1.0 / theta : 0.0;
    const double y = x / theta;
    return std::exp((k - 1) * std::log(y) - y - std::lgamma(static_cast<double>(k))) / theta;
}

double erlang_cdf(double x, int k, double theta) {
    check_erlang(k, theta);
    if (x <= 0.0) return 0.0;
    const double y = x / theta;
    if (y < k) return lower_series(k, y);
    return 1.0 - upper_poisson(k, y);
}

double erlang_sf(double x, int k, double theta) {
    check_erlang(k, theta);
    if (x <= 0.0) return 1.0;
    const double y = x / theta;
    if (y < k) return 1.0 - lower_series(k, y);
    return upper_poisson(k, y);
}

double erlang_quantile(double p, int k, double theta) {
    check_erlang(k, theta);
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("erlang_quantile: p must lie in (0, 1)");
    }
    if (k == 1) {
        return theta * (p > 0.5 ? -std::log(1.0 - p) : -std::log1p(-p));
    }
    // Work in unit scale. g is increasing in y; for p > 0.5 it is phrased
    // through the upper tail so that p close to 1 keeps full accuracy.
    const bool upper = p > 0.5;
    const double tail = 1.0 - p;
    auto g = [&](double y) {
        return upper ? tail - erlang_sf(y, k, 1.0) : erlang_cdf(y, k, 1.0) - p;
    };

    double lo = 0.0;
    double hi = static_cast<double>(k);
    while (g(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
    }
    double y = 0.5 * (lo + hi);
    for (int iter = 0; iter < 300; ++iter) {
        const double gy = g(y);
        if (gy == 0.0) break;
        if (gy < 0.0) {
            lo = y;
        } else {
            hi = y;
        }
        // Newton step on the cdf; pdf is the derivative of both tails.
        const double dens = erlang_pdf(y, k, 1.0);
        double next = dens > 0.0 ? y - gy / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - y) <= 1e-15 * std::max(1.0, y) || hi - lo <= 1e-15 * hi) {
            y = next;
            break;
        }
        y = next;
    }
    return theta * y;
}

// ---------------------------------------------------------------------------
// Binomial coefficients
// ---------------------------------------------------------------------------

std::uint64_t binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) {
        throw std::domain_error("binomial: requires 0 <= k <= n");
    }
    if (n > 64) {
        throw std::overflow_error("binomial: n > 64 is outside the exact range");
    }
    __extension__ using wide = unsigned __int128;
    k = std::min(k, n - k);
    wide acc = 1;
    for (int i = 0; i < k; ++i) {
        acc = acc * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
    }
    return static_cast<std::uint64_t>(acc);
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod 7/15
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd Kronrod nodes kXgk[1], [3], [5], [7].
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const RealFunction& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * fsum;
        if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate_adaptive(const RealFunction& f, double a, double b,
                                    const QuadratureSpec& spec) {
    const double ends[2] = {a, b};
    return integrate_adaptive(f, std::span<const double>(ends), spec);
}

QuadratureResult integrate_adaptive(const RealFunction& f, std::span<const double> breakpoints,
                                    const QuadratureSpec& spec) {
    spec.validate();
    if (breakpoints.size() < 2) {
        throw std::invalid_argument("integrate_1d: need at least two breakpoints");
    }
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i - 1] < breakpoints[i])) {
            throw std::invalid_argument("integrate_1d: requires a < b");
        }
    }

    std::priority_queue<Segment> heap;
    double total = 0.0;
    double total_error = 0.0;
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        const Segment panel = gk15(f, breakpoints[i - 1], breakpoints[i]);
        total += panel.value;
        total_error += panel.error;
        heap.push(panel);
    }
    int subdivisions = static_cast<int>(breakpoints.size()) - 1;

    auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

    while (total_error > tolerance() && subdivisions < spec.max_subdivisions) {
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Segment left = gk15(f, worst.a, mid);
        const Segment right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }

    // Resum to shed the drift of incremental updates.
    double value = 0.0;
    double error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    QuadratureResult result{value, error, subdivisions, false};
    result.converged = error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
    return result;
}

double integrate_1d(const RealFunction& f, double a, double b, const QuadratureSpec& spec) {
    const QuadratureResult r = integrate_adaptive(f, a, b, spec);
    if (!r.converged) {
        throw NonConvergenceError("integrate_1d: tolerance not met after " +
                                      std::to_string(r.subdivisions) + " subdivisions",
                                  r);
    }
    return r.value;
}

}  // namespace cobeam
