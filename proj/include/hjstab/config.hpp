#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hjstab/fourier.hpp"

namespace hjstab {

/// Flat `key = value` experiment description. Lines starting with '#' are
/// comments. Fourier coefficient functions use
///   lambda.a0 = 1
///   lambda.cos.2 = 0.25     # a_2 cos 4πx
///   lambda.sin.1 = 0.5      # b_1 sin 2πx
/// and the same for V and phi (the evolve initial perturbation).
struct ExperimentConfig {
    std::string model = "example1";
    FourierSeries lambda = FourierSeries::constant(1.0);
    FourierSeries V = FourierSeries::constant(1.0);
    /// Constant stationary solution; defaults to 0 for example1 and +1 for
    /// example2 (the other branch is -1).
    std::optional<double> u0;

    int n = 512;
    int aubry_n = 256;
    double t_final = 5.0;
    double sample_dt = 0.05;
    std::uint64_t seed = 1;

    int trials = 5;
    std::optional<double> delta;
    double tol = 1e-6;
    int max_iters = 200;
    std::vector<double> x0 = {0.0, 0.37};

    /// stationary_sub | stationary_super | evol_sub | evol_super | periodic_sub
    std::string kind = "stationary_sub";
    std::optional<double> eps;
    std::optional<double> theta;
    int verify_nx = 256;
    int verify_nt = 256;

    /// offset | fourier | certificate | csv
    std::string initial = "offset";
    double initial_offset = 0.01;
    FourierSeries phi = FourierSeries::constant(0.0);
    std::string initial_csv;
    bool snapshots = false;
};

/// Throws Error(ConfigError) naming the source line and field.
ExperimentConfig parse_config(std::istream& in, std::string_view source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace hjstab
