#pragma once

/**
 * @file sep_analysis.hpp
 * @brief Analytic symbol error probability of the two-phase scheme.
 *
 * Conditioned on K simultaneous sources, the SINR of the reinforced source is
 *
 *   gamma = mu^2 b^2 xi^2 sigma_s^2 / (mu^2 b^2 xi sigma_eta^2 + sigma_v^2),
 *
 * with xi ~ Erlang(N, sigma_a^2) the aggregate channel power and
 * sigma_eta^2 = (K-1) sigma_a^2 sigma_s^2 + sigma_w^2. The operations here
 * evaluate the exact M-PSK SEP (a Craig-form integral over the MGF of gamma),
 * a closed-form upper bound obtained from a linear-in-xi surrogate SINR, a
 * cruder single-term bound, and the two limiting floors.
 */

#include <optional>
#include <string_view>
#include <vector>

#include "cobeam/channel_model.hpp"
#include "cobeam/math_kernel.hpp"

namespace cobeam {

enum class SepMethod {
    monte_carlo,
    exact_quadrature,
    closed_bound,
    simple_bound,
    awgn_floor,
    power_floor,
};

std::string_view to_string(SepMethod method);
/// Throws std::invalid_argument for unknown names.
SepMethod parse_sep_method(std::string_view name);

enum class SepStatus {
    ok,
    not_converged,  ///< quadrature budget exhausted; value is the partial result
    degenerate,     ///< limit taken by convention (zero interference and noise)
};

struct SepEstimate {
    double value = 0.0;
    SepMethod method = SepMethod::exact_quadrature;
    std::optional<double> uncertainty;
    SepStatus status = SepStatus::ok;
};

struct SurrogateParams {
    double xi0 = 0.0;      ///< epsilon-quantile of xi
    double c_gamma = 0.0;  ///< surrogate SINR per unit of xi
    double c = 0.0;        ///< sin^2(pi/M) sigma_a^2 c_gamma
    double zeta = 0.0;     ///< sqrt(c / (1 + c)) cot(pi/M)
};

double sigma_eta2(int k, const NormalizedScales& scales);

/// SINR for a given aggregate channel power xi.
double instantaneous_sinr(double xi, int k, const NormalizedScales& scales);

/// The same SINR written in normalised quantities, xi_tilde = xi / sigma_a^2.
double rewritten_sinr(double xi_tilde, int n, int k, double gamma1_linear, double gamma2_linear);

/// Quadrature settings used by exact_sep when none are given.
QuadratureSpec default_sep_quadrature();

SepEstimate exact_sep(const SystemConfig& config, const QuadratureSpec& quad = default_sep_quadrature());

SurrogateParams surrogate_params(const SystemConfig& config);

/// (1/pi) int_0^{(M-1)pi/M} (1 + c / sin^2 phi)^{-N} dphi in closed form.
/// N above 64 is evaluated by quadrature of the same integral.
double closed_form_integral(double c, int n, int m_order);

/// Reference quadrature of the integral closed_form_integral evaluates.
double closed_form_integral_quadrature(double c, int n, int m_order);

SepEstimate closed_form_bound(const SystemConfig& config);

/// (M-1)/M (1 + c)^{-N}: the Craig integrand at its peak phi = pi/2 times
/// the integration length; (1/2)(1 + sigma_a^2 c_gamma)^{-N} for BPSK.
SepEstimate simple_bound(const SystemConfig& config);

/// SEP at the deterministic SINR gamma2 (AWGN, N -> infinity limit).
SepEstimate awgn_floor(const SystemConfig& config);

/// Closed-form bound with c_gamma = sigma_s^2 / sigma_eta^2, the limit as the
/// relay transmit power grows without bound. Zero (status degenerate) when
/// sigma_eta^2 = 0.
SepEstimate power_floor(const SystemConfig& config);

/// sum_K p(K) P_s(K). Probabilities must sum to one within 1e-9.
SepEstimate mixture_sep(const std::vector<double>& p_of_k, const std::vector<SepEstimate>& per_k);

/// C(2n, n) / 4^n, exact through n = 32 and via log-gamma beyond.
double central_binomial_ratio(int n);

/// T_jn = C(2n, n) / (C(2(n-j), n-j) 4^j (2(n-j) + 1)).
double t_coefficient(int j, int n);

}  // namespace cobeam
