#pragma once

/**
 * @file protocol_sim.hpp
 * @brief Monte Carlo simulation of the collision-then-beamform protocol.
 *
 * Phase one: K sources transmit at once and collaborator i hears
 *   x_i = sum_j a_ji s_j + w_i.
 * Phase two: for destination m every collaborator sends x_i mu a_mi^* with
 * its steering phase. At the destination direction the steering cancels the
 * propagation phases, leaving
 *   y = mu b sum_i |a_mi|^2 s_m + mu b sum_i a_mi^* eta_i + v,
 *   eta_i = sum_{j != m} a_ji s_j + w_i,
 * which is what simulate_symbol evaluates. Source 0 plays the role of m.
 */

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "cobeam/channel_model.hpp"
#include "cobeam/rng.hpp"

namespace cobeam {

struct TrialOutcome {
    int transmitted_index = 0;
    int detected_index = 0;
    bool ambiguous = false;  ///< y was exactly zero; counted as an error
    double instantaneous_sinr = 0.0;
    std::complex<double> received{0.0, 0.0};

    bool is_error() const noexcept { return ambiguous || detected_index != transmitted_index; }
};

struct BerEstimate {
    std::uint64_t error_count = 0;
    std::uint64_t trials = 0;
    double ber = 0.0;
    double std_error = 0.0;
};

BerEstimate make_ber_estimate(std::uint64_t errors, std::uint64_t trials);

/// Everything one symbol interval draws, kept for inspection by tests.
struct SymbolDraw {
    ChannelDraw channel;
    std::vector<int> symbol_indices;  ///< one per source
};

/// Draw order: channel (desired row first), then the K symbol indices.
SymbolDraw draw_symbol(const SystemConfig& config, const NormalizedScales& scales,
                       RngStream& stream);

/// Received sample at the destination direction for a given draw.
std::complex<double> received_sample(const SymbolDraw& draw, const SystemConfig& config,
                                     const NormalizedScales& scales);

TrialOutcome simulate_symbol(const SystemConfig& config, const NormalizedScales& scales,
                             RngStream& stream);

/// Symbol error rate over independent trials. Trial t uses substream t of
/// config.rng_seed, so the estimate is identical for any thread count. For
/// BPSK this is the bit error rate.
BerEstimate estimate_ber(const SystemConfig& config, std::uint64_t trials);

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Mean instantaneous SINR over full protocol draws.
MeanEstimate empirical_sinr_mean(const SystemConfig& config, std::uint64_t trials);

/// Mean of the normalised SINR formula over direct Erlang draws of xi.
MeanEstimate erlang_sinr_mean(const SystemConfig& config, std::uint64_t trials,
                              std::uint64_t rng_seed);

/// K / (K + 1) <= T <= K / 2.
std::pair<double, double> throughput_bounds(int k);

/// K + 1 + 1 / gamma1.
double sinr_penalty_beta(int k, double gamma1_linear);

}  // namespace cobeam
