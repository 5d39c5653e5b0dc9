#pragma once

/**
 * @file geometry_beam.hpp
 * @brief Random disk geometry, initial phases and the far-field beampattern.
 *
 * All lengths are expressed relative to the carrier wavelength; a placement
 * stores node radii normalised by the disk radius R plus the single ratio
 * R / lambda. Path loss to the destination is common to every node and is
 * factored out of everything in this module.
 */

#include <complex>
#include <cstdint>
#include <vector>

#include "cobeam/rng.hpp"

namespace cobeam {

struct PolarNode {
    double r;    ///< radius over disk radius, in [0, 1]
    double psi;  ///< azimuth in [0, 2 pi)
};

struct NodePlacement {
    std::vector<PolarNode> nodes;
    double disk_radius_over_lambda = 2.0;

    /// Throws std::invalid_argument on an empty or out-of-range placement.
    void validate() const;
    std::size_t size() const noexcept { return nodes.size(); }
};

struct BeampatternSample {
    double phi = 0.0;
    double analytic_power = 0.0;
    bool has_empirical = false;
    double empirical_power = 0.0;
    double empirical_stderr = 0.0;
    double target_phi = 0.0;
};

/// n nodes uniform over the unit disk: r = sqrt(u), psi uniform.
NodePlacement sample_placement(int n, double disk_radius_over_lambda, std::uint64_t rng_seed);
NodePlacement sample_placement(int n, double disk_radius_over_lambda, RngStream stream);

/// Closed-loop phase -2 pi d / lambda (not reduced modulo 2 pi).
double initial_phase_closed_loop(double distance_over_lambda);

/// Open-loop phase 2 pi (R / lambda) (r / R) cos(phi_m - psi).
double initial_phase_open_loop(double r_over_R, double psi, double phi_m,
                               double disk_radius_over_lambda);

/// Exact node-to-destination distance over lambda, destination at polar
/// coordinates (d0 / lambda, phi_m) in the plane of the disk.
double node_distance_over_lambda(const PolarNode& node, double disk_radius_over_lambda,
                                 double d0_over_lambda, double phi_m);

/// alpha(phi; phi_m) = 4 pi (R / lambda) sin((phi_m - phi) / 2).
double beam_alpha(double phi, double phi_m, double disk_radius_over_lambda);

/// Far-field array factor (1/N) sum_i exp(j alpha z_i),
/// z_i = r_i sin(psi_i - (phi_m + phi) / 2).
std::complex<double> array_factor(const NodePlacement& placement, double phi, double phi_m);

/// 1/N + (1 - 1/N) |2 J1(alpha) / alpha|^2.
double average_beampattern_analytic(int n, double phi, double phi_m,
                                    double disk_radius_over_lambda);

struct EmpiricalPower {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo mean of |F|^2 over independent placements. Trial t draws its
/// placement from substream t of rng_seed, so the result does not depend on
/// how trials are scheduled.
EmpiricalPower average_beampattern_empirical(int n, double phi, double phi_m,
                                             double disk_radius_over_lambda, int trials,
                                             std::uint64_t rng_seed);

/// Empirical averages for a whole angle grid, reusing each placement across
/// all angles. Entry i corresponds to phis[i].
std::vector<EmpiricalPower> average_beampattern_empirical_grid(
    int n, const std::vector<double>& phis, double phi_m, double disk_radius_over_lambda,
    int trials, std::uint64_t rng_seed);

}  // namespace cobeam
