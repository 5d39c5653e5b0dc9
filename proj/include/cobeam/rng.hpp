#pragma once

// Counter-based random streams.
//
// A stream is a (key, counter) pair. The key is derived by hashing the
// parent key with a child index, so any path of indices such as
// (seed, trial, node) names an independent stream, and a Monte Carlo run
// gives bit-identical results whatever order its trials are evaluated in.
// Output i of a stream is splitmix64(key + i * golden).

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace cobeam {

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    /// Independent child stream; does not advance this stream.
    RngStream substream(std::uint64_t index) const {
        return RngStream(key_, mix(index + 0xbb67ae8584caa73bULL));
    }

    std::uint64_t next_u64() {
        counter_ += kGolden;
        return mix(key_ + counter_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a logarithm argument.
    double uniform_open0() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire's multiply-shift; the bias is below 2^-64 * n and irrelevant here.
        __extension__ using wide = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<wide>(next_u64()) * n) >> 64);
    }

    /// Circular complex Gaussian CN(0, variance): exponential power, uniform phase.
    std::complex<double> complex_normal(double variance) {
        const double power = -variance * std::log(uniform_open0());
        const double phase = 2.0 * std::numbers::pi * uniform();
        return std::polar(std::sqrt(power), phase);
    }

    std::uint64_t key() const noexcept { return key_; }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    RngStream(std::uint64_t parent, std::uint64_t salt) : key_(mix(parent ^ salt)) {}

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace cobeam
