#include "cobeam/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cobeam/geometry_beam.hpp"
#include "cobeam/parallel.hpp"
#include "cobeam/protocol_sim.hpp"

namespace cobeam {

namespace {

// Quadrature slack allowed when checking analytic orderings.
constexpr double kOrderingSlack = 1e-7;

const std::vector<std::string_view>& sweepable_variables() {
    static const std::vector<std::string_view> names = {
        "n_collab", "k_sources", "gamma1_db", "gamma2_db", "psk_order", "epsilon", "phi"};
    return names;
}

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    if (!text.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("spec: bad number for '" + key + "': " + text);
    }
    return value;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(parse_double(key, item));
    return out;
}

std::vector<double> linspace_step(double first, double last, double step) {
    std::vector<double> out;
    const int count = static_cast<int>(std::lround((last - first) / step)) + 1;
    for (int i = 0; i < count; ++i) out.push_back(first + i * step);
    return out;
}

struct PointValue {
    double value = 0.0;
    std::optional<double> std_error;
    bool present = false;
};

}  // namespace

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::fig1_ber_vs_gamma2: return "fig1_ber_vs_gamma2";
        case ExperimentKind::fig2_ber_vs_n: return "fig2_ber_vs_n";
        case ExperimentKind::fig3_ber_vs_k: return "fig3_ber_vs_k";
        case ExperimentKind::fig4_ber_vs_gamma1: return "fig4_ber_vs_gamma1";
        case ExperimentKind::beampattern: return "beampattern";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
    for (ExperimentKind k : {ExperimentKind::fig1_ber_vs_gamma2, ExperimentKind::fig2_ber_vs_n,
                             ExperimentKind::fig3_ber_vs_k, ExperimentKind::fig4_ber_vs_gamma1,
                             ExperimentKind::beampattern}) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown experiment kind: " + std::string(name));
}

void apply_sweep_value(SystemConfig& config, const std::string& variable, double value) {
    auto as_int = [&](const char* what) {
        if (value != std::floor(value)) {
            throw std::invalid_argument(std::string("sweep: ") + what + " needs integral values");
        }
        return static_cast<int>(value);
    };
    if (variable == "n_collab") {
        config.n_collab = as_int("n_collab");
    } else if (variable == "k_sources") {
        config.k_sources = as_int("k_sources");
    } else if (variable == "gamma1_db") {
        config.gamma1_db = value;
    } else if (variable == "gamma2_db") {
        config.gamma2_db = value;
    } else if (variable == "psk_order") {
        config.psk_order = as_int("psk_order");
    } else if (variable == "epsilon") {
        config.epsilon = value;
    } else {
        throw std::invalid_argument("sweep: '" + variable + "' is not a SystemConfig field");
    }
}

void ExperimentSpec::validate() const {
    base.validate();
    auto check = [](const Sweep& s, bool required, const char* what) {
        if (s.variable.empty()) {
            if (required) throw std::invalid_argument(std::string(what) + ": variable missing");
            if (!s.values.empty()) {
                throw std::invalid_argument(std::string(what) + ": values without a variable");
            }
            return;
        }
        const auto& names = sweepable_variables();
        if (std::find(names.begin(), names.end(), s.variable) == names.end()) {
            throw std::invalid_argument(std::string(what) + ": invalid variable '" + s.variable + "'");
        }
        if (s.values.empty()) throw std::invalid_argument(std::string(what) + ": no values");
        if (!std::is_sorted(s.values.begin(), s.values.end())) {
            throw std::invalid_argument(std::string(what) + ": values must be sorted");
        }
    };
    check(sweep, true, "sweep");
    check(curves, false, "curves");
    if (kind == ExperimentKind::beampattern) {
        if (sweep.variable != "phi") {
            throw std::invalid_argument("beampattern: sweep variable must be phi");
        }
        if (!curves.variable.empty()) {
            throw std::invalid_argument("beampattern: curves are not supported");
        }
        if (!(disk_radius_over_lambda > 0.0)) {
            throw std::invalid_argument("beampattern: R/lambda must be positive");
        }
    } else {
        if (sweep.variable == "phi" || curves.variable == "phi") {
            throw std::invalid_argument("phi can only be swept by a beampattern experiment");
        }
        if (methods.empty()) throw std::invalid_argument("spec: no methods selected");
        if (trials < 1 && std::find(methods.begin(), methods.end(), SepMethod::monte_carlo) !=
                              methods.end()) {
            throw std::invalid_argument("spec: monte_carlo needs trials >= 1");
        }
        // Every point must itself be a valid config.
        for (double cv : curves.variable.empty() ? std::vector<double>{0.0} : curves.values) {
            for (double sv : sweep.values) {
                SystemConfig c = base;
                if (!curves.variable.empty()) apply_sweep_value(c, curves.variable, cv);
                apply_sweep_value(c, sweep.variable, sv);
                c.validate();
            }
        }
    }
}

ExperimentSpec default_spec(ExperimentKind kind) {
    ExperimentSpec spec;
    spec.kind = kind;
    spec.trials = kDeskScaleTrials;
    spec.base = SystemConfig{};  // K = 4, gamma1 = gamma2 = 20 dB, BPSK, eps = 0.01
    spec.methods = {SepMethod::monte_carlo, SepMethod::exact_quadrature, SepMethod::closed_bound,
                    SepMethod::simple_bound};
    spec.curves = {"n_collab", {8, 16, 32}};
    spec.output_path = std::string(to_string(kind)) + ".csv";
    switch (kind) {
        case ExperimentKind::fig1_ber_vs_gamma2:
            spec.sweep = {"gamma2_db", linspace_step(0.0, 24.0, 4.0)};
            break;
        case ExperimentKind::fig2_ber_vs_n:
            spec.sweep = {"n_collab", {2, 4, 8, 16, 32, 64}};
            spec.curves = {"gamma2_db", {10, 15, 20}};
            break;
        case ExperimentKind::fig3_ber_vs_k:
            spec.sweep = {"k_sources", linspace_step(1.0, 8.0, 1.0)};
            break;
        case ExperimentKind::fig4_ber_vs_gamma1:
            spec.sweep = {"gamma1_db", linspace_step(0.0, 30.0, 5.0)};
            break;
        case ExperimentKind::beampattern: {
            spec.base.n_collab = 16;
            spec.trials = 20000;
            spec.methods.clear();
            spec.curves = {};
            std::vector<double> phis(256);
            for (std::size_t i = 0; i < phis.size(); ++i) {
                phis[i] = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / 256.0;
            }
            spec.sweep = {"phi", std::move(phis)};
            break;
        }
    }
    return spec;
}

std::vector<ExperimentSpec> default_specs() {
    return {default_spec(ExperimentKind::fig1_ber_vs_gamma2),
            default_spec(ExperimentKind::fig2_ber_vs_n),
            default_spec(ExperimentKind::fig3_ber_vs_k),
            default_spec(ExperimentKind::fig4_ber_vs_gamma1),
            default_spec(ExperimentKind::beampattern)};
}

std::vector<SepMethod> parse_method_list(const std::string& text) {
    std::vector<SepMethod> out;
    for (const auto& m : split_list(text)) out.push_back(parse_sep_method(m));
    return out;
}

std::string to_spec_text(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << "kind = " << to_string(spec.kind) << '\n';
    out << to_config_text(spec.base);
    out << "sweep_var = " << spec.sweep.variable << '\n';
    out << "sweep_values = " << join_doubles(spec.sweep.values) << '\n';
    if (!spec.curves.variable.empty()) {
        out << "curve_var = " << spec.curves.variable << '\n';
        out << "curve_values = " << join_doubles(spec.curves.values) << '\n';
    }
    out << "trials = " << spec.trials << '\n';
    out << "methods = ";
    for (std::size_t i = 0; i < spec.methods.size(); ++i) {
        if (i) out << ',';
        out << to_string(spec.methods[i]);
    }
    out << '\n';
    out << "output_path = " << spec.output_path << '\n';
    out << "phi_target = " << format_double(spec.phi_target) << '\n';
    out << "disk_radius_over_lambda = " << format_double(spec.disk_radius_over_lambda) << '\n';
    return out.str();
}

ExperimentSpec parse_spec_text(const std::string& text) {
    ExperimentSpec spec;
    spec.methods.clear();
    spec.curves = {};
    for (const auto& [key, value] : parse_key_values(text)) {
        if (apply_config_key(spec.base, key, value)) continue;
        if (key == "kind") {
            spec.kind = parse_experiment_kind(value);
        } else if (key == "sweep_var") {
            spec.sweep.variable = value;
        } else if (key == "sweep_values") {
            spec.sweep.values = parse_doubles(key, value);
        } else if (key == "curve_var") {
            spec.curves.variable = value;
        } else if (key == "curve_values") {
            spec.curves.values = parse_doubles(key, value);
        } else if (key == "trials") {
            const double t = parse_double(key, value);
            if (t < 0.0 || t != std::floor(t)) throw std::invalid_argument("spec: bad trials");
            spec.trials = static_cast<std::uint64_t>(t);
        } else if (key == "methods") {
            spec.methods = parse_method_list(value);
        } else if (key == "output_path") {
            spec.output_path = value;
        } else if (key == "phi_target") {
            spec.phi_target = parse_double(key, value);
        } else if (key == "disk_radius_over_lambda") {
            spec.disk_radius_over_lambda = parse_double(key, value);
        } else {
            throw std::invalid_argument("spec: unknown key '" + key + "'");
        }
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open spec file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec_text(buf.str());
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

namespace {

ExperimentResult run_beampattern(const ExperimentSpec& spec) {
    const int n = spec.base.n_collab;
    const auto& phis = spec.sweep.values;
    std::vector<EmpiricalPower> empirical;
    if (spec.trials > 0) {
        empirical = average_beampattern_empirical_grid(n, phis, spec.phi_target,
                                                       spec.disk_radius_over_lambda,
                                                       static_cast<int>(spec.trials),
                                                       spec.base.rng_seed);
    }
    std::ostringstream csv;
    csv << kBeamCsvSchema << '\n' << kBeamCsvHeader << '\n';
    for (std::size_t i = 0; i < phis.size(); ++i) {
        const double analytic =
            average_beampattern_analytic(n, phis[i], spec.phi_target, spec.disk_radius_over_lambda);
        csv << format_double(phis[i]) << ',' << format_double(analytic) << ',';
        if (!empirical.empty()) {
            csv << format_double(empirical[i].mean) << ',' << format_double(empirical[i].std_error);
        } else {
            csv << ',';
        }
        csv << '\n';
    }
    ExperimentResult result;
    result.csv = csv.str();
    result.summary.rows = phis.size();
    result.summary.notes.push_back("R/lambda = " + format_double(spec.disk_radius_over_lambda) +
                                   " and phi_m = " + format_double(spec.phi_target) +
                                   " are modelling choices, not published values");
    return result;
}

PointValue evaluate_analytic(SepMethod method, const SystemConfig& config) {
    SepEstimate est;
    switch (method) {
        case SepMethod::exact_quadrature: est = exact_sep(config); break;
        case SepMethod::closed_bound: est = closed_form_bound(config); break;
        case SepMethod::simple_bound: est = simple_bound(config); break;
        case SepMethod::awgn_floor: est = awgn_floor(config); break;
        case SepMethod::power_floor: est = power_floor(config); break;
        case SepMethod::monte_carlo: throw std::logic_error("monte_carlo is not analytic");
    }
    return {est.value, est.uncertainty, true};
}

ExperimentResult run_sep_sweep(const ExperimentSpec& spec) {
    struct Point {
        SystemConfig config;
        double sweep_value;
    };
    std::vector<Point> points;
    const std::vector<double> curve_values =
        spec.curves.variable.empty() ? std::vector<double>{0.0} : spec.curves.values;
    for (double sv : spec.sweep.values) {
        for (double cv : curve_values) {
            SystemConfig c = spec.base;
            if (!spec.curves.variable.empty()) apply_sweep_value(c, spec.curves.variable, cv);
            apply_sweep_value(c, spec.sweep.variable, sv);
            points.push_back({c, sv});
        }
    }

    const std::size_t n_methods = spec.methods.size();
    std::vector<PointValue> values(points.size() * n_methods);

    // Analytic evaluations are independent; spread them over threads. Monte
    // Carlo points parallelise internally, so they run one after another.
    std::vector<std::size_t> analytic_slots;
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (std::size_t m = 0; m < n_methods; ++m) {
            if (spec.methods[m] != SepMethod::monte_carlo) analytic_slots.push_back(p * n_methods + m);
        }
    }
    parallel_for(analytic_slots.size(), [&](std::size_t i) {
        const std::size_t slot = analytic_slots[i];
        values[slot] = evaluate_analytic(spec.methods[slot % n_methods], points[slot / n_methods].config);
    });
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (std::size_t m = 0; m < n_methods; ++m) {
            if (spec.methods[m] != SepMethod::monte_carlo) continue;
            const BerEstimate ber = estimate_ber(points[p].config, spec.trials);
            values[p * n_methods + m] = {ber.ber, ber.std_error, true};
        }
    }

    ExperimentResult result;
    auto find = [&](std::size_t p, SepMethod method) -> const PointValue* {
        for (std::size_t m = 0; m < n_methods; ++m) {
            if (spec.methods[m] == method) return &values[p * n_methods + m];
        }
        return nullptr;
    };
    auto describe = [&](const SystemConfig& c) {
        return "N=" + std::to_string(c.n_collab) + " K=" + std::to_string(c.k_sources) +
               " gamma1_db=" + format_double(c.gamma1_db) + " gamma2_db=" +
               format_double(c.gamma2_db) + " M=" + std::to_string(c.psk_order);
    };
    auto& summary = result.summary;
    for (std::size_t p = 0; p < points.size(); ++p) {
        const SystemConfig& c = points[p].config;
        const PointValue* mc = find(p, SepMethod::monte_carlo);
        const PointValue* exact = find(p, SepMethod::exact_quadrature);
        const PointValue* closed = find(p, SepMethod::closed_bound);
        const PointValue* simple = find(p, SepMethod::simple_bound);
        const PointValue* awgn = find(p, SepMethod::awgn_floor);
        const PointValue* floor = find(p, SepMethod::power_floor);
        if (mc && exact) {
            const double p_ref = exact->value;
            const double se = std::sqrt(p_ref * (1.0 - p_ref) / static_cast<double>(spec.trials));
            const double diff = std::abs(mc->value - p_ref);
            const double sigmas = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            summary.max_mc_deviation_sigmas =
                std::max(summary.max_mc_deviation_sigmas.value_or(0.0), sigmas);
        }
        if (exact && closed && exact->value > 0.0 && closed->value > 0.0) {
            const double gap = std::log10(closed->value / exact->value);
            summary.max_log10_bound_gap = std::max(summary.max_log10_bound_gap.value_or(-std::numeric_limits<double>::infinity()), gap);
        }
        auto order = [&](const PointValue* lo, const PointValue* hi, const char* text, double slack) {
            if (lo && hi && lo->value > hi->value + slack) {
                summary.violations.push_back({std::string(text) + " at " + describe(c) + " (" +
                                              format_double(lo->value) + " > " +
                                              format_double(hi->value) + ")"});
            }
        };
        order(exact, closed, "exact_quadrature > closed_bound", kOrderingSlack);
        order(closed, simple, "closed_bound > simple_bound", 1e-12);
        order(awgn, exact, "awgn_floor > exact_quadrature", kOrderingSlack);
        order(floor, exact, "power_floor > exact_quadrature", kOrderingSlack);
    }

    std::ostringstream csv;
    csv << kSepCsvSchema << '\n' << kSepCsvHeader << '\n';
    for (std::size_t p = 0; p < points.size(); ++p) {
        const SystemConfig& c = points[p].config;
        for (std::size_t m = 0; m < n_methods; ++m) {
            const PointValue& v = values[p * n_methods + m];
            csv << spec.sweep.variable << ',' << format_double(points[p].sweep_value) << ','
                << c.n_collab << ',' << c.k_sources << ',' << format_double(c.gamma1_db) << ','
                << format_double(c.gamma2_db) << ',' << to_string(spec.methods[m]) << ','
                << format_double(v.value) << ',';
            if (v.std_error) csv << format_double(*v.std_error);
            csv << '\n';
            ++summary.rows;
        }
    }
    result.csv = csv.str();
    return result;
}

}  // namespace

ExperimentResult run_experiment_to_string(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.kind == ExperimentKind::beampattern) return run_beampattern(spec);
    return run_sep_sweep(spec);
}

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
    if (spec.output_path.empty()) throw std::runtime_error("spec: output_path is empty");
    ExperimentResult result = run_experiment_to_string(spec);
    std::ofstream out(spec.output_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + spec.output_path);
    out << result.csv;
    out.flush();
    if (!out) throw std::runtime_error("failed writing output file: " + spec.output_path);
    return result.summary;
}

std::string format_summary(const ExperimentSpec& spec, const ExperimentSummary& summary) {
    std::ostringstream out;
    out << to_string(spec.kind) << ": " << summary.rows << " rows";
    if (!spec.output_path.empty()) out << " -> " << spec.output_path;
    out << '\n';
    if (summary.max_mc_deviation_sigmas) {
        out << "  max |MC - exact| = " << *summary.max_mc_deviation_sigmas
            << " binomial std errors (trials = " << spec.trials << ")\n";
    }
    if (summary.max_log10_bound_gap) {
        out << "  max log10(closed_bound / exact) = " << *summary.max_log10_bound_gap << '\n';
    }
    for (const auto& note : summary.notes) out << "  note: " << note << '\n';
    for (const auto& v : summary.violations) out << "  ORDERING VIOLATION: " << v.description << '\n';
    return out.str();
}

}  // namespace cobeam
