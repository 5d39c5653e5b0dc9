#include "cobeam/channel_model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace cobeam {

void SystemConfig::validate() const {
    if (n_collab < 1) throw std::invalid_argument("SystemConfig: n_collab must be >= 1");
    if (k_sources < 1) throw std::invalid_argument("SystemConfig: k_sources must be >= 1");
    if (!is_valid_psk_order(psk_order)) {
        throw std::invalid_argument("SystemConfig: psk_order must be a power of two >= 2");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("SystemConfig: epsilon must lie in (0, 1)");
    }
    if (std::isnan(gamma1_db) || std::isnan(gamma2_db)) {
        throw std::invalid_argument("SystemConfig: gamma values must not be NaN");
    }
}

double NormalizedScales::noise_over_gain2() const { return sigma_v2 / (mu_b * mu_b); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

NormalizedScales normalize(const SystemConfig& config) {
    config.validate();
    NormalizedScales scales;
    scales.sigma_w2 = 1.0 / db_to_linear(config.gamma1_db);
    scales.mu_b = std::sqrt(db_to_linear(config.gamma2_db)) / config.n_collab;
    return scales;
}

double gamma1_from_scales(const NormalizedScales& s) {
    return s.sigma_s2 * s.sigma_a2 / s.sigma_w2;
}

double gamma2_from_scales(const NormalizedScales& s, int n) {
    const double nn = static_cast<double>(n);
    return nn * nn * s.mu_b * s.mu_b * s.sigma_s2 * s.sigma_a2 * s.sigma_a2 / s.sigma_v2;
}

ChannelDraw draw_channel(const NormalizedScales& scales, int k, int n, RngStream& stream) {
    if (k < 1 || n < 1) throw std::invalid_argument("draw_channel: k and n must be >= 1");
    ChannelDraw draw;
    draw.gains.assign(static_cast<std::size_t>(k), {});
    for (auto& row : draw.gains) {
        row.resize(static_cast<std::size_t>(n));
        for (auto& a : row) a = stream.complex_normal(scales.sigma_a2);
    }
    draw.relay_noise.resize(static_cast<std::size_t>(n));
    for (auto& w : draw.relay_noise) w = stream.complex_normal(scales.sigma_w2);
    draw.dest_noise = stream.complex_normal(scales.sigma_v2);
    return draw;
}

bool is_valid_psk_order(int m_order) {
    return m_order >= 2 && (m_order & (m_order - 1)) == 0;
}

std::complex<double> psk_symbol(int index, int m_order) {
    if (!is_valid_psk_order(m_order)) throw std::domain_error("psk_symbol: invalid order");
    if (index < 0 || index >= m_order) throw std::domain_error("psk_symbol: index out of range");
    if (m_order == 2) return {index == 0 ? 1.0 : -1.0, 0.0};
    if (m_order == 4) {
        // Exact axis points keep the QPSK symbols free of rounding residue.
        constexpr std::complex<double> qpsk[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return qpsk[index];
    }
    return std::polar(1.0, 2.0 * std::numbers::pi * index / m_order);
}

int psk_detect(std::complex<double> y, int m_order) {
    if (!is_valid_psk_order(m_order)) throw std::domain_error("psk_detect: invalid order");
    if (y == std::complex<double>(0.0, 0.0)) {
        throw DetectionAmbiguous("psk_detect: zero sample has no phase");
    }
    double angle = std::arg(y);
    if (angle < 0.0) angle += 2.0 * std::numbers::pi;
    const double t = angle * m_order / (2.0 * std::numbers::pi);  // in [0, M]
    // ceil(t - 1/2) rounds to nearest with halves going down.
    const int nearest = static_cast<int>(std::ceil(t - 0.5));
    if (nearest >= m_order) {
        // Wrapped past the last point: the tie at t = M - 1/2 is between M-1 and 0.
        return 0;
    }
    if (t == m_order - 0.5) return 0;
    return nearest;
}

double draw_erlang_xi(int n, double scale, RngStream& stream) {
    if (n < 1) throw std::invalid_argument("draw_erlang_xi: n must be >= 1");
    if (!(scale > 0.0)) throw std::invalid_argument("draw_erlang_xi: scale must be > 0");
    double xi = 0.0;
    for (int i = 0; i < n; ++i) xi += std::norm(stream.complex_normal(scale));
    return xi;
}

// ---------------------------------------------------------------------------
// Key-value serialisation
// ---------------------------------------------------------------------------

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw std::invalid_argument("config: bad value for '" + key + "': " + text);
    }
    return value;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        }
        if (!seen.insert(key).second) {
            throw std::invalid_argument("config: duplicate key '" + key + "'");
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

bool apply_config_key(SystemConfig& config, const std::string& key, const std::string& value) {
    if (key == "n_collab") {
        config.n_collab = parse_number<int>(key, value);
    } else if (key == "k_sources") {
        config.k_sources = parse_number<int>(key, value);
    } else if (key == "gamma1_db") {
        config.gamma1_db = parse_number<double>(key, value);
    } else if (key == "gamma2_db") {
        config.gamma2_db = parse_number<double>(key, value);
    } else if (key == "psk_order") {
        config.psk_order = parse_number<int>(key, value);
    } else if (key == "epsilon") {
        config.epsilon = parse_number<double>(key, value);
    } else if (key == "rng_seed") {
        config.rng_seed = parse_number<std::uint64_t>(key, value);
    } else {
        return false;
    }
    return true;
}

std::string to_config_text(const SystemConfig& c) {
    std::ostringstream out;
    out << "n_collab = " << c.n_collab << '\n'
        << "k_sources = " << c.k_sources << '\n'
        << "gamma1_db = " << format_double(c.gamma1_db) << '\n'
        << "gamma2_db = " << format_double(c.gamma2_db) << '\n'
        << "psk_order = " << c.psk_order << '\n'
        << "epsilon = " << format_double(c.epsilon) << '\n'
        << "rng_seed = " << c.rng_seed << '\n';
    return out.str();
}

SystemConfig parse_config_text(const std::string& text) {
    SystemConfig config;
    for (const auto& [key, value] : parse_key_values(text)) {
        if (!apply_config_key(config, key, value)) {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    config.validate();
    return config;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void save_config(const SystemConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << to_config_text(config);
}

}  // namespace cobeam
