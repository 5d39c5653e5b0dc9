#include "cobeam/protocol_sim.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cobeam/parallel.hpp"
#include "cobeam/sep_analysis.hpp"

namespace cobeam {

BerEstimate make_ber_estimate(std::uint64_t errors, std::uint64_t trials) {
    BerEstimate est;
    est.error_count = errors;
    est.trials = trials;
    est.ber = static_cast<double>(errors) / static_cast<double>(trials);
    est.std_error = std::sqrt(est.ber * (1.0 - est.ber) / static_cast<double>(trials));
    return est;
}

SymbolDraw draw_symbol(const SystemConfig& config, const NormalizedScales& scales,
                       RngStream& stream) {
    SymbolDraw draw;
    draw.channel = draw_channel(scales, config.k_sources, config.n_collab, stream);
    draw.symbol_indices.resize(static_cast<std::size_t>(config.k_sources));
    for (auto& idx : draw.symbol_indices) {
        idx = static_cast<int>(stream.below(static_cast<std::uint64_t>(config.psk_order)));
    }
    return draw;
}

std::complex<double> received_sample(const SymbolDraw& draw, const SystemConfig& config,
                                     const NormalizedScales& scales) {
    const int k = config.k_sources;
    const int n = config.n_collab;
    std::vector<std::complex<double>> symbols(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        symbols[j] = std::sqrt(scales.sigma_s2) * psk_symbol(draw.symbol_indices[j], config.psk_order);
    }
    const auto& a = draw.channel.gains;
    std::complex<double> beam{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        // What collaborator i heard in phase one, re-weighted by conj(a_mi).
        std::complex<double> heard = draw.channel.relay_noise[i];
        for (int j = 0; j < k; ++j) heard += a[j][i] * symbols[j];
        beam += std::conj(a[0][i]) * heard;
    }
    return scales.mu_b * beam + draw.channel.dest_noise;
}

TrialOutcome simulate_symbol(const SystemConfig& config, const NormalizedScales& scales,
                             RngStream& stream) {
    const SymbolDraw draw = draw_symbol(config, scales, stream);
    TrialOutcome out;
    out.transmitted_index = draw.symbol_indices[0];
    out.received = received_sample(draw, config, scales);

    double xi = 0.0;
    for (const auto& g : draw.channel.gains[0]) xi += std::norm(g);
    out.instantaneous_sinr = instantaneous_sinr(xi, config.k_sources, scales);

    try {
        out.detected_index = psk_detect(out.received, config.psk_order);
    } catch (const DetectionAmbiguous&) {
        out.ambiguous = true;
        out.detected_index = -1;
    }
    return out;
}

BerEstimate estimate_ber(const SystemConfig& config, std::uint64_t trials) {
    if (trials < 1) throw std::invalid_argument("estimate_ber: trials must be >= 1");
    const NormalizedScales scales = normalize(config);
    const RngStream root(config.rng_seed);
    const std::size_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    std::vector<std::uint64_t> errors(blocks, 0);
    parallel_for(blocks, [&](std::size_t b) {
        const std::uint64_t end = std::min<std::uint64_t>(trials, (b + 1) * kTrialBlock);
        std::uint64_t count = 0;
        for (std::uint64_t t = b * kTrialBlock; t < end; ++t) {
            RngStream stream = root.substream(t);
            if (simulate_symbol(config, scales, stream).is_error()) ++count;
        }
        errors[b] = count;
    });
    std::uint64_t total = 0;
    for (auto e : errors) total += e;
    return make_ber_estimate(total, trials);
}

namespace {

template <typename Sample>
MeanEstimate blocked_mean(std::uint64_t trials, Sample&& sample) {
    const std::size_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    std::vector<double> sums(blocks, 0.0), squares(blocks, 0.0);
    parallel_for(blocks, [&](std::size_t b) {
        const std::uint64_t end = std::min<std::uint64_t>(trials, (b + 1) * kTrialBlock);
        double s = 0.0, q = 0.0;
        for (std::uint64_t t = b * kTrialBlock; t < end; ++t) {
            const double v = sample(t);
            s += v;
            q += v * v;
        }
        sums[b] = s;
        squares[b] = q;
    });
    double s = 0.0, q = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        s += sums[b];
        q += squares[b];
    }
    const double n = static_cast<double>(trials);
    MeanEstimate out;
    out.mean = s / n;
    if (trials > 1) {
        const double var = std::max(0.0, (q - n * out.mean * out.mean) / (n - 1.0));
        out.std_error = std::sqrt(var / n);
    }
    return out;
}

}  // namespace

MeanEstimate empirical_sinr_mean(const SystemConfig& config, std::uint64_t trials) {
    if (trials < 1) throw std::invalid_argument("empirical_sinr_mean: trials must be >= 1");
    const NormalizedScales scales = normalize(config);
    const RngStream root(config.rng_seed);
    return blocked_mean(trials, [&](std::uint64_t t) {
        RngStream stream = root.substream(t);
        return simulate_symbol(config, scales, stream).instantaneous_sinr;
    });
}

MeanEstimate erlang_sinr_mean(const SystemConfig& config, std::uint64_t trials,
                              std::uint64_t rng_seed) {
    if (trials < 1) throw std::invalid_argument("erlang_sinr_mean: trials must be >= 1");
    config.validate();
    const double g1 = db_to_linear(config.gamma1_db);
    const double g2 = db_to_linear(config.gamma2_db);
    const RngStream root(rng_seed);
    return blocked_mean(trials, [&](std::uint64_t t) {
        RngStream stream = root.substream(t);
        const double xi_tilde = draw_erlang_xi(config.n_collab, 1.0, stream);
        return rewritten_sinr(xi_tilde, config.n_collab, config.k_sources, g1, g2);
    });
}

std::pair<double, double> throughput_bounds(int k) {
    if (k < 1) throw std::invalid_argument("throughput_bounds: k must be >= 1");
    return {k / (k + 1.0), k / 2.0};
}

double sinr_penalty_beta(int k, double gamma1_linear) {
    if (k < 1) throw std::invalid_argument("sinr_penalty_beta: k must be >= 1");
    if (!(gamma1_linear > 0.0)) throw std::invalid_argument("sinr_penalty_beta: gamma1 must be > 0");
    return k + 1.0 + 1.0 / gamma1_linear;
}

}  // namespace cobeam
