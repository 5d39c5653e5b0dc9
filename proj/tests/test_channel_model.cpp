#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <vector>

#include "cobeam/channel_model.hpp"
#include "cobeam/math_kernel.hpp"

using namespace cobeam;

namespace {

constexpr double kPi = std::numbers::pi;

// Kolmogorov-Smirnov distance of a sample against a CDF.
template <class Cdf>
double ks_distance(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, f - i / n, (i + 1) / n - f});
    }
    return d;
}

// Critical value at the 1% level for large samples.
double ks_critical(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

}  // namespace

TEST_CASE("dB conversions") {
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(db_to_linear(20.0) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(db_to_linear(-10.0) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(linear_to_db(db_to_linear(13.7)) == doctest::Approx(13.7).epsilon(1e-14));
}

TEST_CASE("normalize") {
    SystemConfig c;
    c.n_collab = 8;
    c.gamma1_db = 20.0;
    c.gamma2_db = 20.0;
    const NormalizedScales s = normalize(c);
    CHECK(s.sigma_s2 == 1.0);
    CHECK(s.sigma_a2 == 1.0);
    CHECK(s.sigma_v2 == 1.0);
    CHECK(s.sigma_w2 == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(s.mu_b == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(s.noise_over_gain2() == doctest::Approx(0.64).epsilon(1e-14));

    for (int n : {1, 3, 16, 200}) {
        for (double g1 : {-5.0, 0.0, 17.5, 40.0}) {
            for (double g2 : {-10.0, 0.0, 24.0}) {
                c.n_collab = n;
                c.gamma1_db = g1;
                c.gamma2_db = g2;
                const NormalizedScales t = normalize(c);
                CHECK(linear_to_db(gamma1_from_scales(t)) == doctest::Approx(g1).epsilon(1e-12));
                CHECK(linear_to_db(gamma2_from_scales(t, n)) == doctest::Approx(g2).epsilon(1e-12));
            }
        }
    }
    c.gamma2_db = std::numeric_limits<double>::infinity();
    CHECK(normalize(c).noise_over_gain2() == 0.0);

    c.n_collab = 0;
    CHECK_THROWS_AS(normalize(c), std::invalid_argument);
}

TEST_CASE("SystemConfig validation") {
    SystemConfig c;
    CHECK_NOTHROW(c.validate());
    auto broken = [&](auto mutate) {
        SystemConfig d;
        mutate(d);
        CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    };
    broken([](SystemConfig& d) { d.n_collab = 0; });
    broken([](SystemConfig& d) { d.k_sources = 0; });
    broken([](SystemConfig& d) { d.psk_order = 3; });
    broken([](SystemConfig& d) { d.psk_order = 1; });
    broken([](SystemConfig& d) { d.epsilon = 0.0; });
    broken([](SystemConfig& d) { d.epsilon = 1.0; });
    broken([](SystemConfig& d) { d.gamma1_db = std::nan(""); });
}

TEST_CASE("draw_channel statistics") {
    SystemConfig c;
    c.gamma1_db = 10.0;
    const NormalizedScales s = normalize(c);
    RngStream root(123);
    std::vector<double> phases;
    double power = 0.0, noise_power = 0.0;
    std::size_t count = 0, noise_count = 0;
    for (int t = 0; t < 1000; ++t) {
        RngStream stream = root.substream(t);
        const ChannelDraw d = draw_channel(s, 2, 50, stream);
        REQUIRE(d.gains.size() == 2);
        REQUIRE(d.gains[0].size() == 50);
        REQUIRE(d.relay_noise.size() == 50);
        for (const auto& row : d.gains) {
            for (const auto& a : row) {
                power += std::norm(a);
                phases.push_back(std::arg(a));
                ++count;
            }
        }
        for (const auto& w : d.relay_noise) {
            noise_power += std::norm(w);
            ++noise_count;
        }
    }
    CHECK(std::abs(power / count - 1.0) <= 0.01);
    CHECK(std::abs(noise_power / noise_count - 0.1) <= 0.002);
    const double d = ks_distance(phases, [](double x) { return (x + kPi) / (2.0 * kPi); });
    CHECK(d < ks_critical(phases.size()));
}

TEST_CASE("draw_channel with silent relays") {
    NormalizedScales s;
    s.sigma_w2 = 0.0;
    RngStream stream(1);
    const ChannelDraw d = draw_channel(s, 3, 4, stream);
    for (const auto& w : d.relay_noise) CHECK(w == std::complex<double>(0.0, 0.0));
    CHECK_THROWS_AS(draw_channel(s, 0, 4, stream), std::invalid_argument);
}

TEST_CASE("draw_channel is reproducible") {
    const NormalizedScales s = normalize(SystemConfig{});
    RngStream a(77), b(77);
    const ChannelDraw x = draw_channel(s, 3, 5, a);
    const ChannelDraw y = draw_channel(s, 3, 5, b);
    CHECK(x.gains == y.gains);
    CHECK(x.relay_noise == y.relay_noise);
    CHECK(x.dest_noise == y.dest_noise);
}

TEST_CASE("psk_symbol") {
    CHECK(psk_symbol(0, 2) == std::complex<double>(1.0, 0.0));
    CHECK(psk_symbol(1, 2) == std::complex<double>(-1.0, 0.0));
    CHECK(psk_symbol(1, 4) == std::complex<double>(0.0, 1.0));
    CHECK(psk_symbol(3, 4) == std::complex<double>(0.0, -1.0));
    const auto s8 = psk_symbol(1, 8);
    CHECK(s8.real() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(s8.imag() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    for (int m = 2; m <= 64; m *= 2) {
        for (int i = 0; i < m; ++i) CHECK(std::abs(std::abs(psk_symbol(i, m)) - 1.0) <= 1e-15);
    }
    CHECK_THROWS_AS(psk_symbol(0, 3), std::domain_error);
    CHECK_THROWS_AS(psk_symbol(4, 4), std::domain_error);
    CHECK_THROWS_AS(psk_symbol(-1, 4), std::domain_error);
}

TEST_CASE("psk_detect") {
    CHECK(psk_detect({0.3, 0.0}, 2) == 0);
    CHECK(psk_detect({-0.3, 5.0}, 2) == 1);
    CHECK(psk_detect({0.1, 2.0}, 4) == 1);
    CHECK(psk_detect({2.0, -0.1}, 4) == 0);
    // Decision boundaries: ties go to the lower index, and the boundary
    // between M - 1 and 0 goes to 0.
    CHECK(psk_detect({0.0, 1.0}, 2) == 0);
    CHECK(psk_detect({1.0, 1.0}, 4) == 0);
    CHECK(psk_detect({-1.0, 1.0}, 4) == 1);
    CHECK(psk_detect({-1.0, -1.0}, 4) == 2);
    CHECK(psk_detect({1.0, -1.0}, 4) == 0);
    CHECK(psk_detect({0.0, -1.0}, 2) == 0);
    CHECK_THROWS_AS(psk_detect({0.0, 0.0}, 4), DetectionAmbiguous);
    CHECK_THROWS_AS(psk_detect({1.0, 0.0}, 6), std::domain_error);

    for (int m = 2; m <= 64; m *= 2) {
        for (int i = 0; i < m; ++i) {
            REQUIRE(psk_detect(psk_symbol(i, m), m) == i);
            // A nudge well inside the decision region keeps the decision.
            const double nudge = 0.3 * kPi / m;
            CHECK(psk_detect(3.0 * psk_symbol(i, m) * std::polar(1.0, nudge), m) == i);
            CHECK(psk_detect(0.2 * psk_symbol(i, m) * std::polar(1.0, -nudge), m) == i);
        }
    }
}

TEST_CASE("draw_erlang_xi") {
    for (int n : {1, 4, 16}) {
        RngStream stream(1000 + n);
        std::vector<double> xs(100000);
        double mean = 0.0, sq = 0.0;
        for (auto& x : xs) {
            x = draw_erlang_xi(n, 2.0, stream);
            mean += x;
            sq += x * x;
        }
        mean /= xs.size();
        const double var = sq / xs.size() - mean * mean;
        CHECK(mean == doctest::Approx(2.0 * n).epsilon(0.02));
        CHECK(var == doctest::Approx(4.0 * n).epsilon(0.05));
        const double d = ks_distance(xs, [n](double x) { return erlang_cdf(x, n, 2.0); });
        INFO("n=" << n << " KS=" << d);
        CHECK(d < ks_critical(xs.size()));
    }
    RngStream stream(1);
    CHECK_THROWS_AS(draw_erlang_xi(0, 1.0, stream), std::invalid_argument);
    CHECK_THROWS_AS(draw_erlang_xi(2, 0.0, stream), std::invalid_argument);
}

TEST_CASE("config text round trip") {
    SystemConfig c;
    c.n_collab = 32;
    c.k_sources = 7;
    c.gamma1_db = 13.25;
    c.gamma2_db = -3.1;
    c.psk_order = 16;
    c.epsilon = 0.005;
    c.rng_seed = 18446744073709551615ULL;
    CHECK(parse_config_text(to_config_text(c)) == c);

    const SystemConfig d = parse_config_text("# scenario\nn_collab = 4\n\nk_sources=2  # two\n");
    CHECK(d.n_collab == 4);
    CHECK(d.k_sources == 2);
    CHECK(d.gamma1_db == SystemConfig{}.gamma1_db);

    CHECK_THROWS_AS(parse_config_text("n_collab = 4\nn_collab = 5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("bogus = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("n_collab 4\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("n_collab = four\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("psk_order = 6\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("epsilon = 1.5\n"), std::invalid_argument);

    const auto path = std::filesystem::temp_directory_path() / "cobeam_config_roundtrip.cfg";
    save_config(c, path.string());
    CHECK(load_config(path.string()) == c);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config("/nonexistent/dir/x.cfg"), std::runtime_error);
}

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(20.0) == "20");
    for (double v : {1.0 / 3.0, 1e-300, 123456.789, -2.5e17}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}
