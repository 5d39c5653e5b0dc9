#include "cobeam/geometry_beam.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cobeam/math_kernel.hpp"
#include "cobeam/parallel.hpp"

namespace cobeam {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void NodePlacement::validate() const {
    if (nodes.empty()) throw std::invalid_argument("NodePlacement: no nodes");
    if (!(disk_radius_over_lambda > 0.0)) {
        throw std::invalid_argument("NodePlacement: R/lambda must be positive");
    }
    for (const auto& node : nodes) {
        if (!(node.r >= 0.0 && node.r <= 1.0) || !(node.psi >= 0.0 && node.psi < kTwoPi)) {
            throw std::invalid_argument("NodePlacement: node outside the unit disk");
        }
    }
}

NodePlacement sample_placement(int n, double disk_radius_over_lambda, RngStream stream) {
    if (n < 1) throw std::invalid_argument("sample_placement: n must be >= 1");
    if (!(disk_radius_over_lambda > 0.0)) {
        throw std::invalid_argument("sample_placement: R/lambda must be positive");
    }
    NodePlacement placement;
    placement.disk_radius_over_lambda = disk_radius_over_lambda;
    placement.nodes.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double r = std::sqrt(stream.uniform());
        double psi = kTwoPi * stream.uniform();
        if (psi >= kTwoPi) psi = 0.0;
        placement.nodes.push_back({r, psi});
    }
    return placement;
}

NodePlacement sample_placement(int n, double disk_radius_over_lambda, std::uint64_t rng_seed) {
    return sample_placement(n, disk_radius_over_lambda, RngStream(rng_seed));
}

double initial_phase_closed_loop(double distance_over_lambda) {
    return -kTwoPi * distance_over_lambda;
}

double initial_phase_open_loop(double r_over_R, double psi, double phi_m,
                               double disk_radius_over_lambda) {
    return kTwoPi * disk_radius_over_lambda * r_over_R * std::cos(phi_m - psi);
}

double node_distance_over_lambda(const PolarNode& node, double disk_radius_over_lambda,
                                 double d0_over_lambda, double phi_m) {
    const double rho = node.r * disk_radius_over_lambda;
    const double dx = d0_over_lambda * std::cos(phi_m) - rho * std::cos(node.psi);
    const double dy = d0_over_lambda * std::sin(phi_m) - rho * std::sin(node.psi);
    return std::hypot(dx, dy);
}

double beam_alpha(double phi, double phi_m, double disk_radius_over_lambda) {
    return 2.0 * kTwoPi * disk_radius_over_lambda * std::sin(0.5 * (phi_m - phi));
}

std::complex<double> array_factor(const NodePlacement& placement, double phi, double phi_m) {
    const double alpha = beam_alpha(phi, phi_m, placement.disk_radius_over_lambda);
    const double mid = 0.5 * (phi_m + phi);
    std::complex<double> sum{0.0, 0.0};
    for (const auto& node : placement.nodes) {
        const double z = node.r * std::sin(node.psi - mid);
        sum += std::polar(1.0, alpha * z);
    }
    return sum / static_cast<double>(placement.nodes.size());
}

double average_beampattern_analytic(int n, double phi, double phi_m,
                                    double disk_radius_over_lambda) {
    if (n < 1) throw std::invalid_argument("average_beampattern_analytic: n must be >= 1");
    const double inv_n = 1.0 / n;
    const double j = jinc(beam_alpha(phi, phi_m, disk_radius_over_lambda));
    return inv_n + (1.0 - inv_n) * j * j;
}

std::vector<EmpiricalPower> average_beampattern_empirical_grid(
    int n, const std::vector<double>& phis, double phi_m, double disk_radius_over_lambda,
    int trials, std::uint64_t rng_seed) {
    if (trials < 1) throw std::invalid_argument("average_beampattern_empirical: trials must be >= 1");
    const RngStream root(rng_seed);
    const std::size_t points = phis.size();
    const std::size_t total = static_cast<std::size_t>(trials);
    const std::size_t blocks = (total + kTrialBlock - 1) / kTrialBlock;

    // Per block: sum and sum of squares for every angle.
    std::vector<std::vector<double>> sums(blocks), squares(blocks);
    parallel_for(blocks, [&](std::size_t b) {
        std::vector<double> s(points, 0.0), q(points, 0.0);
        const std::size_t end = std::min(total, (b + 1) * kTrialBlock);
        for (std::size_t t = b * kTrialBlock; t < end; ++t) {
            const NodePlacement placement =
                sample_placement(n, disk_radius_over_lambda, root.substream(t));
            for (std::size_t i = 0; i < points; ++i) {
                const double power = std::norm(array_factor(placement, phis[i], phi_m));
                s[i] += power;
                q[i] += power * power;
            }
        }
        sums[b] = std::move(s);
        squares[b] = std::move(q);
    });

    std::vector<EmpiricalPower> out(points);
    for (std::size_t i = 0; i < points; ++i) {
        double s = 0.0, q = 0.0;
        for (std::size_t b = 0; b < blocks; ++b) {
            s += sums[b][i];
            q += squares[b][i];
        }
        const double mean = s / trials;
        double std_error = 0.0;
        if (trials > 1) {
            const double var = std::max(0.0, (q - trials * mean * mean) / (trials - 1));
            std_error = std::sqrt(var / trials);
        }
        out[i] = {mean, std_error};
    }
    return out;
}

EmpiricalPower average_beampattern_empirical(int n, double phi, double phi_m,
                                             double disk_radius_over_lambda, int trials,
                                             std::uint64_t rng_seed) {
    return average_beampattern_empirical_grid(n, {phi}, phi_m, disk_radius_over_lambda, trials,
                                              rng_seed)
        .front();
}

}  // namespace cobeam
