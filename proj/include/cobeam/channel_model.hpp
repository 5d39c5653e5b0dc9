#pragma once

/**
 * @file channel_model.hpp
 * @brief Scenario parameters, their normalisation, and random draws.
 *
 * A scenario is described by two normalised SNRs:
 *
 *   gamma1 = sigma_s^2 sigma_a^2 / sigma_w^2           (information sharing)
 *   gamma2 = N^2 mu^2 b^2 sigma_s^2 sigma_a^4 / sigma_v^2  (asymptotic, at destination)
 *
 * The instantaneous SINR depends only on (gamma1, gamma2, K, N), so symbol,
 * channel and destination-noise powers are pinned to one and the remaining
 * freedom lives in sigma_w^2 and the product mu * b.
 */

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cobeam/rng.hpp"

namespace cobeam {

struct SystemConfig {
    int n_collab = 8;
    int k_sources = 4;
    double gamma1_db = 20.0;
    double gamma2_db = 20.0;
    int psk_order = 2;
    double epsilon = 0.01;
    std::uint64_t rng_seed = 1;

    /// Throws std::invalid_argument when an invariant is broken.
    void validate() const;
    bool operator==(const SystemConfig&) const = default;
};

struct NormalizedScales {
    double sigma_s2 = 1.0;
    double sigma_a2 = 1.0;
    double sigma_w2 = 1.0;
    double mu_b = 1.0;  ///< mu_m * b_m
    double sigma_v2 = 1.0;

    /// sigma_v^2 / (mu b)^2, which stays finite (zero) as mu b -> infinity.
    double noise_over_gain2() const;
};

double db_to_linear(double db);
double linear_to_db(double linear);

NormalizedScales normalize(const SystemConfig& config);

/// gamma2 (linear) implied by a set of scales for n collaborating nodes.
double gamma2_from_scales(const NormalizedScales& scales, int n);
double gamma1_from_scales(const NormalizedScales& scales);

/// One slot: gains[j][i] is a_ji from source j to collaborator i.
struct ChannelDraw {
    std::vector<std::vector<std::complex<double>>> gains;
    std::vector<std::complex<double>> relay_noise;
    std::complex<double> dest_noise{0.0, 0.0};
};

ChannelDraw draw_channel(const NormalizedScales& scales, int k, int n, RngStream& stream);

bool is_valid_psk_order(int m_order);

/// exp(j 2 pi index / M); BPSK gives {+1, -1}.
std::complex<double> psk_symbol(int index, int m_order);

/// Thrown by psk_detect for y = 0, where every decision region is equally close.
class DetectionAmbiguous : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Index of the constellation point angularly closest to y; ties go to the
/// lower index.
int psk_detect(std::complex<double> y, int m_order);

/// sum of |g_i|^2 over n i.i.d. CN(0, scale) draws, i.e. Erlang(n, scale).
double draw_erlang_xi(int n, double scale, RngStream& stream);

// Flat key = value serialisation. Keys: n_collab, k_sources, gamma1_db,
// gamma2_db, psk_order, epsilon, rng_seed. '#' starts a comment.

std::string format_double(double value);
std::string to_config_text(const SystemConfig& config);
SystemConfig parse_config_text(const std::string& text);
SystemConfig load_config(const std::string& path);
void save_config(const SystemConfig& config, const std::string& path);

/// Splits "key = value" lines; blank lines and '#' comments are skipped.
/// Throws std::invalid_argument on malformed lines or repeated keys.
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);

/// Applies one key to a config. Returns false for keys it does not own.
bool apply_config_key(SystemConfig& config, const std::string& key, const std::string& value);

}  // namespace cobeam
