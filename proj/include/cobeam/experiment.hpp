#pragma once

/**
 * @file experiment.hpp
 * @brief Figure-style parameter sweeps written as CSV.
 *
 * An ExperimentSpec names a base SystemConfig, one swept variable, an
 * optional curve variable (one output curve per value), the SEP methods to
 * evaluate and where to write the result. Specs serialise to the same flat
 * key = value format as SystemConfig, extended with the keys below.
 *
 * SEP sweeps produce
 *
 *   # schema=sep_sweep/v1
 *   sweep_var,sweep_value,n_collab,k_sources,gamma1_db,gamma2_db,method,value,stderr
 *
 * and beampattern sweeps produce
 *
 *   # schema=beampattern/v1
 *   phi_rad,analytic,empirical,stderr
 */

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cobeam/channel_model.hpp"
#include "cobeam/sep_analysis.hpp"

namespace cobeam {

enum class ExperimentKind {
    fig1_ber_vs_gamma2,
    fig2_ber_vs_n,
    fig3_ber_vs_k,
    fig4_ber_vs_gamma1,
    beampattern,
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

struct Sweep {
    std::string variable;  ///< empty for "no curves"
    std::vector<double> values;

    bool operator==(const Sweep&) const = default;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::fig1_ber_vs_gamma2;
    SystemConfig base;
    Sweep sweep;
    Sweep curves;
    std::uint64_t trials = 100000;
    std::vector<SepMethod> methods;
    std::string output_path;
    // Beampattern only.
    double phi_target = 0.0;
    double disk_radius_over_lambda = 2.0;

    /// Throws std::invalid_argument for an unknown or unsorted sweep, or an
    /// invalid base config.
    void validate() const;
    bool operator==(const ExperimentSpec&) const = default;
};

inline constexpr std::string_view kSepCsvSchema = "# schema=sep_sweep/v1";
inline constexpr std::string_view kSepCsvHeader =
    "sweep_var,sweep_value,n_collab,k_sources,gamma1_db,gamma2_db,method,value,stderr";
inline constexpr std::string_view kBeamCsvSchema = "# schema=beampattern/v1";
inline constexpr std::string_view kBeamCsvHeader = "phi_rad,analytic,empirical,stderr";

inline constexpr std::uint64_t kDeskScaleTrials = 100000;
inline constexpr std::uint64_t kFullScaleTrials = 1000000;

ExperimentSpec default_spec(ExperimentKind kind);

/// The four figure sweeps followed by the beampattern sweep.
std::vector<ExperimentSpec> default_specs();

/// "monte_carlo,exact_quadrature" -> methods; throws on unknown names.
std::vector<SepMethod> parse_method_list(const std::string& text);

std::string to_spec_text(const ExperimentSpec& spec);
ExperimentSpec parse_spec_text(const std::string& text);
ExperimentSpec load_spec(const std::string& path);

/// Sets a SystemConfig field from a sweep value. Integer fields must receive
/// integral values.
void apply_sweep_value(SystemConfig& config, const std::string& variable, double value);

struct BoundViolation {
    std::string description;
};

struct ExperimentSummary {
    std::size_t rows = 0;
    /// max |MC - exact| over points, in units of the binomial standard error
    /// sqrt(p (1 - p) / trials) at the analytic p. Absent unless both methods ran.
    std::optional<double> max_mc_deviation_sigmas;
    /// max log10(closed_bound / exact) over points.
    std::optional<double> max_log10_bound_gap;
    std::vector<BoundViolation> violations;
    std::vector<std::string> notes;
};

struct ExperimentResult {
    std::string csv;
    ExperimentSummary summary;
};

/// Runs the sweep and returns the CSV text without touching the filesystem.
ExperimentResult run_experiment_to_string(const ExperimentSpec& spec);

/// Runs the sweep and writes the CSV to spec.output_path. Throws
/// std::runtime_error when the file cannot be written.
ExperimentSummary run_experiment(const ExperimentSpec& spec);

std::string format_summary(const ExperimentSpec& spec, const ExperimentSummary& summary);

}  // namespace cobeam
