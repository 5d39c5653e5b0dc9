#include "cobeam/sep_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cobeam {

namespace {

constexpr double kPi = std::numbers::pi;

// Upper truncation of every xi integral: mass beyond is 1e-12.
constexpr double kXiTailMass = 1e-12;
// Lowest ladder point of the xi integral and the ratio between rungs.
constexpr double kXiHeadMass = 1e-13;
constexpr double kLadderRatio = 4.0;

double sin2_pi_over_m(int m_order) {
    if (m_order == 2) return 1.0;
    const double s = std::sin(kPi / m_order);
    return s * s;
}

double cot_pi_over_m(int m_order) {
    if (m_order == 2) return 0.0;
    return 1.0 / std::tan(kPi / m_order);
}

double sector_limit(int m_order) { return (m_order - 1) * kPi / m_order; }

QuadratureSpec tight_quadrature() { return {1e-14, 1e-12, 2000}; }

}  // namespace

std::string_view to_string(SepMethod method) {
    switch (method) {
        case SepMethod::monte_carlo: return "monte_carlo";
        case SepMethod::exact_quadrature: return "exact_quadrature";
        case SepMethod::closed_bound: return "closed_bound";
        case SepMethod::simple_bound: return "simple_bound";
        case SepMethod::awgn_floor: return "awgn_floor";
        case SepMethod::power_floor: return "power_floor";
    }
    return "unknown";
}

SepMethod parse_sep_method(std::string_view name) {
    for (SepMethod m : {SepMethod::monte_carlo, SepMethod::exact_quadrature,
                        SepMethod::closed_bound, SepMethod::simple_bound,
                        SepMethod::awgn_floor, SepMethod::power_floor}) {
        if (to_string(m) == name) return m;
    }
    throw std::invalid_argument("unknown SEP method: " + std::string(name));
}

double sigma_eta2(int k, const NormalizedScales& scales) {
    if (k < 1) throw std::invalid_argument("sigma_eta2: k must be >= 1");
    return (k - 1) * scales.sigma_a2 * scales.sigma_s2 + scales.sigma_w2;
}

double instantaneous_sinr(double xi, int k, const NormalizedScales& scales) {
    if (xi < 0.0) throw std::invalid_argument("instantaneous_sinr: xi must be >= 0");
    if (xi == 0.0) return 0.0;
    // Divided through by (mu b)^2 so that mu b -> infinity stays finite.
    return xi * xi * scales.sigma_s2 /
           (xi * sigma_eta2(k, scales) + scales.noise_over_gain2());
}

double rewritten_sinr(double xi_tilde, int n, int k, double gamma1_linear, double gamma2_linear) {
    const double n2 = static_cast<double>(n) * n;
    return (xi_tilde * xi_tilde / n2) /
           ((k - 1 + 1.0 / gamma1_linear) / n2 * xi_tilde + 1.0 / gamma2_linear);
}

QuadratureSpec default_sep_quadrature() { return {1e-9, 1e-9, 400}; }

SepEstimate exact_sep(const SystemConfig& config, const QuadratureSpec& quad) {
    quad.validate();
    const NormalizedScales scales = normalize(config);
    const int n = config.n_collab;
    const int k = config.k_sources;
    const double g = sin2_pi_over_m(config.psk_order);
    const double xi_max = erlang_quantile(1.0 - kXiTailMass, n, scales.sigma_a2);

    // For small phi the integrand collapses onto xi near zero, narrower than
    // one panel on [0, xi_max]; a geometric ladder of panels keeps it resolved.
    std::vector<double> ladder{erlang_quantile(kXiHeadMass, n, scales.sigma_a2)};
    while (ladder.back() * kLadderRatio < xi_max) ladder.push_back(ladder.back() * kLadderRatio);
    ladder.push_back(xi_max);
    ladder.insert(ladder.begin(), 0.0);

    const QuadratureSpec inner_spec{quad.abs_tol * 0.1, quad.rel_tol * 0.1,
                                    quad.max_subdivisions + static_cast<int>(ladder.size())};
    bool inner_converged = true;
    double inner_error = 0.0;

    // M_gamma(-g / sin^2 phi) by quadrature over the Erlang density of xi.
    auto mgf_at = [&](double phi) {
        const double sphi = std::sin(phi);
        const double s = g / (sphi * sphi);
        auto integrand = [&](double xi) {
            return std::exp(-s * instantaneous_sinr(xi, k, scales)) *
                   erlang_pdf(xi, n, scales.sigma_a2);
        };
        const QuadratureResult r = integrate_adaptive(integrand, ladder, inner_spec);
        inner_converged = inner_converged && r.converged;
        inner_error = std::max(inner_error, r.abs_error);
        return r.value;
    };

    const double upper = sector_limit(config.psk_order);
    const QuadratureResult outer = integrate_adaptive(mgf_at, 0.0, upper, quad);

    SepEstimate est;
    est.method = SepMethod::exact_quadrature;
    est.value = std::clamp(outer.value / kPi, 0.0, 1.0);
    est.uncertainty = (outer.abs_error + upper * (inner_error + kXiTailMass)) / kPi;
    est.status = (outer.converged && inner_converged) ? SepStatus::ok : SepStatus::not_converged;
    return est;
}

SurrogateParams surrogate_params(const SystemConfig& config) {
    const NormalizedScales scales = normalize(config);
    SurrogateParams p;
    p.xi0 = erlang_quantile(config.epsilon, config.n_collab, scales.sigma_a2);
    p.c_gamma = scales.sigma_s2 /
                (sigma_eta2(config.k_sources, scales) + scales.noise_over_gain2() / p.xi0);
    p.c = sin2_pi_over_m(config.psk_order) * scales.sigma_a2 * p.c_gamma;
    p.zeta = std::sqrt(p.c / (1.0 + p.c)) * cot_pi_over_m(config.psk_order);
    return p;
}

double central_binomial_ratio(int n) {
    if (n < 0) throw std::invalid_argument("central_binomial_ratio: n must be >= 0");
    if (2 * n <= 64) {
        return std::ldexp(static_cast<double>(binomial(2 * n, n)), -2 * n);
    }
    return std::exp(std::lgamma(2.0 * n + 1.0) - 2.0 * std::lgamma(n + 1.0) -
                    n * std::log(4.0));
}

double t_coefficient(int j, int n) {
    if (j < 1 || j > n) throw std::invalid_argument("t_coefficient: requires 1 <= j <= n");
    return central_binomial_ratio(n) / (central_binomial_ratio(n - j) * (2.0 * (n - j) + 1.0));
}

double closed_form_integral_quadrature(double c, int n, int m_order) {
    auto integrand = [&](double phi) {
        const double sphi = std::sin(phi);
        return std::exp(-n * std::log1p(c / (sphi * sphi)));
    };
    return integrate_1d(integrand, 0.0, sector_limit(m_order), tight_quadrature()) / kPi;
}

double closed_form_integral(double c, int n, int m_order) {
    if (n < 1) throw std::invalid_argument("closed_form_integral: n must be >= 1");
    if (!is_valid_psk_order(m_order)) throw std::invalid_argument("closed_form_integral: bad M");
    if (!(c >= 0.0)) throw std::invalid_argument("closed_form_integral: c must be >= 0");
    const double full = (m_order - 1.0) / m_order;
    if (c == 0.0) return full;
    if (n > 64) {
        return closed_form_integral_quadrature(c, n, m_order);
    }

    const double mu = std::sqrt(c / (1.0 + c));
    const double angle = std::atan(mu * cot_pi_over_m(m_order));
    const double cos_a = std::cos(angle);
    const double inv = 1.0 / (1.0 + c);

    double central_sum = 0.0;
    double t_sum = 0.0;
    double inv_pow = 1.0;  // (1 + c)^{-n}
    for (int i = 0; i < n; ++i) {
        central_sum += central_binomial_ratio(i) * inv_pow;
        if (i >= 1) {
            double inner = 0.0;
            for (int j = 1; j <= i; ++j) {
                inner += t_coefficient(j, i) * std::pow(cos_a, 2 * (i - j) + 1);
            }
            t_sum += inner * inv_pow;
        }
        inv_pow *= inv;
    }
    const double value =
        full - mu / kPi * ((0.5 * kPi + angle) * central_sum + std::sin(angle) * t_sum);
    return std::max(0.0, value);
}

SepEstimate closed_form_bound(const SystemConfig& config) {
    const SurrogateParams p = surrogate_params(config);
    SepEstimate est;
    est.method = SepMethod::closed_bound;
    est.value = closed_form_integral(p.c, config.n_collab, config.psk_order);
    return est;
}

SepEstimate simple_bound(const SystemConfig& config) {
    const SurrogateParams p = surrogate_params(config);
    SepEstimate est;
    est.method = SepMethod::simple_bound;
    est.value = (config.psk_order - 1.0) / config.psk_order *
                std::exp(-config.n_collab * std::log1p(p.c));
    return est;
}

SepEstimate awgn_floor(const SystemConfig& config) {
    config.validate();
    const double gamma2 = db_to_linear(config.gamma2_db);
    const double g = sin2_pi_over_m(config.psk_order);
    SepEstimate est;
    est.method = SepMethod::awgn_floor;
    if (std::isinf(gamma2)) {
        est.value = 0.0;
        return est;
    }
    auto integrand = [&](double phi) {
        const double sphi = std::sin(phi);
        return std::exp(-gamma2 * g / (sphi * sphi));
    };
    est.value = integrate_1d(integrand, 0.0, sector_limit(config.psk_order), tight_quadrature()) / kPi;
    return est;
}

SepEstimate power_floor(const SystemConfig& config) {
    const NormalizedScales scales = normalize(config);
    const double eta = sigma_eta2(config.k_sources, scales);
    SepEstimate est;
    est.method = SepMethod::power_floor;
    if (eta == 0.0) {
        est.value = 0.0;
        est.status = SepStatus::degenerate;
        return est;
    }
    const double c = sin2_pi_over_m(config.psk_order) * scales.sigma_a2 * scales.sigma_s2 / eta;
    est.value = closed_form_integral(c, config.n_collab, config.psk_order);
    return est;
}

SepEstimate mixture_sep(const std::vector<double>& p_of_k, const std::vector<SepEstimate>& per_k) {
    if (p_of_k.size() != per_k.size() || p_of_k.empty()) {
        throw std::invalid_argument("mixture_sep: weight and estimate counts differ");
    }
    double total = 0.0;
    for (double p : p_of_k) {
        if (p < 0.0) throw std::invalid_argument("mixture_sep: negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("mixture_sep: probabilities do not sum to one");
    }
    SepEstimate out;
    out.method = per_k.front().method;
    double variance = 0.0;
    bool all_uncertain = true;
    for (std::size_t i = 0; i < per_k.size(); ++i) {
        out.value += p_of_k[i] * per_k[i].value;
        if (per_k[i].uncertainty) {
            variance += p_of_k[i] * p_of_k[i] * *per_k[i].uncertainty * *per_k[i].uncertainty;
        } else {
            all_uncertain = false;
        }
        if (per_k[i].status != SepStatus::ok) out.status = per_k[i].status;
    }
    if (all_uncertain) out.uncertainty = std::sqrt(variance);
    return out;
}

}  // namespace cobeam
