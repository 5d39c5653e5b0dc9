// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cobeam/experiment.hpp"
#include "cobeam/geometry_beam.hpp"
#include "cobeam/math_kernel.hpp"
#include "cobeam/parallel.hpp"
#include "cobeam/protocol_sim.hpp"
#include "cobeam/sep_analysis.hpp"

using namespace cobeam;

namespace {

constexpr double kPi = std::numbers::pi;

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    std::printf("%s criterion %d: %s [%s]\n", pass ? "PASS" : "FAIL", id, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

std::string describe(const SystemConfig& c) {
    std::ostringstream s;
    s << "N=" << c.n_collab << " K=" << c.k_sources << " g1=" << c.gamma1_db
      << " g2=" << c.gamma2_db << " M=" << c.psk_order;
    return s.str();
}

// Sweep points of a spec in output order (sweep value outer, curve inner).
std::vector<SystemConfig> expand(const ExperimentSpec& spec) {
    std::vector<SystemConfig> out;
    const std::vector<double> curves =
        spec.curves.variable.empty() ? std::vector<double>{0.0} : spec.curves.values;
    for (double sv : spec.sweep.values) {
        for (double cv : curves) {
            SystemConfig c = spec.base;
            if (!spec.curves.variable.empty()) apply_sweep_value(c, spec.curves.variable, cv);
            apply_sweep_value(c, spec.sweep.variable, sv);
            out.push_back(c);
        }
    }
    return out;
}

double binomial_se(double p, std::uint64_t trials) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

struct GridPoint {
    SystemConfig config;
    double exact = 0.0;
    double closed = 0.0;
    double simple = 0.0;
    double awgn = 0.0;
    BerEstimate mc;
};

std::vector<GridPoint> fig1_grid;

void criterion_1() {
    const auto start = std::chrono::steady_clock::now();
    const ExperimentSpec spec = default_spec(ExperimentKind::fig1_ber_vs_gamma2);
    double worst = 0.0;
    std::string worst_at;
    for (const SystemConfig& c : expand(spec)) {
        GridPoint g;
        g.config = c;
        g.exact = exact_sep(c).value;
        g.closed = closed_form_bound(c).value;
        g.simple = simple_bound(c).value;
        g.awgn = awgn_floor(c).value;
        g.mc = estimate_ber(c, kDeskScaleTrials);
        const double se = binomial_se(g.exact, kDeskScaleTrials);
        const double dev = std::abs(g.mc.ber - g.exact);
        const double sigmas = se > 0.0 ? dev / se : (dev == 0.0 ? 0.0 : INFINITY);
        if (sigmas >= worst) {
            worst = sigmas;
            worst_at = describe(c);
        }
        fig1_grid.push_back(g);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(1, worst <= 4.0 && seconds < 300.0,
           "figure-1 grid Monte Carlo vs exact SEP within 4 binomial stderr, under 5 minutes",
           std::to_string(fig1_grid.size()) + " points, 1e5 trials each; max deviation " +
               fmt("%.2f", worst) + " sigma at " + worst_at + "; runtime " + fmt("%.1f s", seconds));
}

void criterion_2() {
    int below = 0, simple_below = 0;
    double max_gap = -INFINITY, min_gap = INFINITY;
    for (const auto& g : fig1_grid) {
        if (g.exact > g.closed + 1e-7) ++below;
        if (g.closed > g.simple + 1e-12) ++simple_below;
        if (g.exact > 0.0) {
            const double gap = std::log10(g.closed / g.exact);
            max_gap = std::max(max_gap, gap);
            min_gap = std::min(min_gap, gap);
        }
    }
    report(2, below == 0 && simple_below == 0,
           "closed_form_bound >= exact_sep and simple_bound >= closed_form_bound on the figure-1 grid",
           std::to_string(below) + " closed-bound violations, " + std::to_string(simple_below) +
               " simple-bound violations; log10(closed/exact) gap in [" + fmt("%.4f", min_gap) +
               ", " + fmt("%.4f", max_gap) + "]");
}

// Consecutive points along the sweep for each curve, with MC estimates.
struct TrendResult {
    int checked = 0;
    int violated = 0;
    std::string first_violation;
};

TrendResult trend(const ExperimentSpec& spec, bool increasing) {
    const auto configs = expand(spec);
    const std::size_t curves = spec.curves.values.size();
    std::vector<BerEstimate> mc;
    for (const auto& c : configs) mc.push_back(estimate_ber(c, kDeskScaleTrials));
    TrendResult r;
    for (std::size_t i = curves; i < configs.size(); ++i) {
        const BerEstimate& prev = mc[i - curves];
        const BerEstimate& next = mc[i];
        const double se = std::hypot(binomial_se(prev.ber, prev.trials), binomial_se(next.ber, next.trials));
        const double step = increasing ? prev.ber - next.ber : next.ber - prev.ber;
        ++r.checked;
        if (step > 3.0 * se) {
            if (r.violated++ == 0) r.first_violation = describe(configs[i]);
        }
    }
    return r;
}

void criterion_3() {
    const TrendResult in_n = trend(default_spec(ExperimentKind::fig2_ber_vs_n), false);
    const TrendResult in_k = trend(default_spec(ExperimentKind::fig3_ber_vs_k), true);

    // gamma1 10 -> 30 dB at K = 4 versus K 4 -> 8 at gamma1 = 20 dB.
    int weak_ok = 0, weak_total = 0;
    std::string detail;
    for (int n : {8, 16, 32}) {
        SystemConfig c;
        c.n_collab = n;
        c.gamma2_db = 20.0;
        auto at = [&](int k, double g1) {
            SystemConfig d = c;
            d.k_sources = k;
            d.gamma1_db = g1;
            return estimate_ber(d, kDeskScaleTrials);
        };
        const BerEstimate g10 = at(4, 10.0), g30 = at(4, 30.0), k4 = at(4, 20.0), k8 = at(8, 20.0);
        const double d_gamma = std::abs(g10.ber - g30.ber);
        const double d_k = std::abs(k8.ber - k4.ber);
        const double se = std::hypot(std::hypot(g10.std_error, g30.std_error),
                                     std::hypot(k4.std_error, k8.std_error));
        ++weak_total;
        if (d_gamma < d_k + 3.0 * se) ++weak_ok;
        detail += " N=" + std::to_string(n) + ": dBER(g1)=" + fmt("%.3g", d_gamma) +
                  " dBER(K)=" + fmt("%.3g", d_k);
    }
    const bool pass = in_n.violated == 0 && in_k.violated == 0 && weak_ok == weak_total;
    std::string info = "N steps " + std::to_string(in_n.checked) + " (" +
                       std::to_string(in_n.violated) + " rising), K steps " +
                       std::to_string(in_k.checked) + " (" + std::to_string(in_k.violated) +
                       " falling);" + detail;
    if (!in_n.first_violation.empty()) info += "; N violation at " + in_n.first_violation;
    if (!in_k.first_violation.empty()) info += "; K violation at " + in_k.first_violation;
    report(3, pass, "BER trends in N, K and gamma1 within 3 stderr", info);
}

void criterion_4() {
    int below = 0;
    for (const auto& g : fig1_grid) {
        if (g.awgn > g.exact + 1e-7) ++below;
    }
    double worst = 0.0;
    for (double g2_db = -10.0; g2_db <= 30.0; g2_db += 0.5) {
        SystemConfig c;
        c.gamma2_db = g2_db;
        const double q = 0.5 * std::erfc(std::sqrt(db_to_linear(g2_db)));
        worst = std::max(worst, std::abs(awgn_floor(c).value - q));
    }
    report(4, below == 0 && worst <= 1e-9,
           "exact_sep >= awgn_floor on the figure-1 grid; BPSK awgn_floor = Q(sqrt(2 gamma2))",
           std::to_string(below) + " violations; max |awgn - Q| = " + fmt("%.2e", worst));
}

void criterion_5() {
    bool pass = true;
    std::string detail;
    for (int n : {8, 16}) {
        SystemConfig c;
        c.n_collab = n;
        c.gamma2_db = 20.0 + 60.0;  // mu_b scaled by 1e3
        const double exact = exact_sep(c).value;
        const double floor = power_floor(c).value;
        const double rel = std::abs(exact - floor) / floor;
        pass = pass && rel <= 0.02;
        detail += "N=" + std::to_string(n) + " exact " + fmt("%.6e", exact) + " floor " +
                  fmt("%.6e", floor) + " rel " + fmt("%.2e", rel) + "; ";
    }

    // Least-squares slope of log10(floor) against N.
    const std::vector<int> ns{8, 16, 32};
    SystemConfig c;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int n : ns) {
        c.n_collab = n;
        const double y = std::log10(power_floor(c).value);
        sx += n;
        sy += y;
        sxx += static_cast<double>(n) * n;
        sxy += n * y;
    }
    const double m = static_cast<double>(ns.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const NormalizedScales s = normalize(c);
    const double law = -std::log10(1.0 + s.sigma_a2 * s.sigma_s2 / sigma_eta2(c.k_sources, s));
    const double rel_slope = std::abs(slope - law) / std::abs(law);
    pass = pass && rel_slope <= 0.10;
    detail += "slope " + fmt("%.4f", slope) + " vs " + fmt("%.4f", law) + " (" +
              fmt("%.1f%%", 100.0 * rel_slope) + ")";
    report(5, pass, "exact_sep meets power_floor at 1e3 relay gain; floor decays per (1+c)^-N", detail);
}

void criterion_6() {
    bool pass = true;
    std::string detail;
    std::vector<double> phis(64);
    for (int i = 0; i < 64; ++i) phis[i] = -kPi + 2.0 * kPi * i / 64.0;
    for (int n : {4, 16, 64}) {
        const bool peak = average_beampattern_analytic(n, 0.0, 0.0, 2.0) == 1.0;
        const auto emp = average_beampattern_empirical_grid(n, phis, 0.0, 2.0, 20000, 2024 + n);
        double worst = 0.0, side_sum = 0.0, side_analytic = 0.0;
        int side_count = 0;
        for (int i = 0; i < 64; ++i) {
            const double a = average_beampattern_analytic(n, phis[i], 0.0, 2.0);
            const double dev = std::abs(emp[i].mean - a);
            const double sigmas = emp[i].std_error > 0.0 ? dev / emp[i].std_error
                                                         : (dev <= 1e-12 ? 0.0 : INFINITY);
            worst = std::max(worst, sigmas);
            if (std::abs(phis[i]) >= kPi / 2.0) {
                side_sum += emp[i].mean;
                side_analytic += a;
                ++side_count;
            }
        }
        const double side = side_sum / side_count;
        const double side_rel = std::abs(side - 1.0 / n) * n;
        const double side_analytic_rel = std::abs(side_analytic / side_count - 1.0 / n) * n;
        pass = pass && peak && worst <= 4.0 && side_rel <= 0.10 && side_analytic_rel <= 0.10;
        if (!detail.empty()) detail += "; ";
        detail += "N=" + std::to_string(n) + (peak ? " peak=1" : " peak!=1") + " max " +
                  fmt("%.2f", worst) + " sigma, sidelobe " + fmt("%.4f", side) + " vs " +
                  fmt("%.4f", 1.0 / n);
    }
    report(6, pass, "beampattern: analytic peak 1, empirical within 4 stderr, sidelobes near 1/N", detail);
}

void criterion_7() {
    std::mt19937 gen(7);
    std::uniform_int_distribution<int> n_d(1, 32), k_d(1, 8), m_d(0, 2);
    std::uniform_real_distribution<double> g1_d(0.0, 30.0), g2_d(0.0, 24.0);
    double closed_worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        SystemConfig c;
        c.n_collab = n_d(gen);
        c.k_sources = k_d(gen);
        c.gamma1_db = g1_d(gen);
        c.gamma2_db = g2_d(gen);
        c.psk_order = 2 << m_d(gen);
        const double cval = surrogate_params(c).c;
        closed_worst = std::max(closed_worst, std::abs(closed_form_bound(c).value -
                                                       closed_form_integral_quadrature(cval, c.n_collab, c.psk_order)));
    }

    double ks_worst_ratio = 0.0;
    for (int n : {1, 8, 32}) {
        RngStream stream(500 + n);
        std::vector<double> xs(100000);
        for (auto& x : xs) x = draw_erlang_xi(n, 1.0, stream);
        std::sort(xs.begin(), xs.end());
        double d = 0.0;
        const double size = static_cast<double>(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double f = erlang_cdf(xs[i], n, 1.0);
            d = std::max({d, f - i / size, (i + 1) / size - f});
        }
        ks_worst_ratio = std::max(ks_worst_ratio, d / (1.63 / std::sqrt(size)));
    }

    std::uniform_real_distribution<double> xi_d(1e-3, 100.0), snr_d(-10.0, 40.0);
    double identity_worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        SystemConfig c;
        c.n_collab = n_d(gen);
        c.k_sources = k_d(gen);
        c.gamma1_db = snr_d(gen);
        c.gamma2_db = snr_d(gen);
        const double xi = xi_d(gen);
        const double direct = instantaneous_sinr(xi, c.k_sources, normalize(c));
        const double rewritten = rewritten_sinr(xi, c.n_collab, c.k_sources,
                                                db_to_linear(c.gamma1_db), db_to_linear(c.gamma2_db));
        identity_worst = std::max(identity_worst, std::abs(direct - rewritten) / rewritten);
    }
    report(7, closed_worst <= 1e-9 && ks_worst_ratio < 1.0 && identity_worst <= 1e-12,
           "closed form vs quadrature, Erlang sampler KS, SINR identity",
           "closed max abs diff " + fmt("%.2e", closed_worst) + " (200 configs); KS D / D_crit(1%) max " +
               fmt("%.3f", ks_worst_ratio) + "; SINR identity max rel " + fmt("%.2e", identity_worst));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void criterion_8() {
    const auto dir = std::filesystem::temp_directory_path() / "cobeam_acceptance";
    std::filesystem::create_directories(dir);
    int identical = 0, total = 0;
    for (ExperimentSpec spec : default_specs()) {
        spec.trials = spec.kind == ExperimentKind::beampattern ? 2000 : 5000;
        if (spec.kind == ExperimentKind::fig2_ber_vs_n) spec.sweep.values = {2, 4, 8};
        const auto a = dir / (std::string(to_string(spec.kind)) + "_a.csv");
        const auto b = dir / (std::string(to_string(spec.kind)) + "_b.csv");
        set_worker_count(1);
        spec.output_path = a.string();
        run_experiment(spec);
        set_worker_count(4);
        spec.output_path = b.string();
        run_experiment(spec);
        set_worker_count(0);
        ++total;
        const std::string ta = read_file(a);
        if (!ta.empty() && ta == read_file(b)) ++identical;
    }
    std::filesystem::remove_all(dir);
    report(8, identical == total, "same spec and seed give byte-identical CSV",
           std::to_string(identical) + "/" + std::to_string(total) +
               " default specs identical across reruns with 1 and 4 worker threads");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
