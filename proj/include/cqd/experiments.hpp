// SPDX-License-Identifier: MIT
#pragma once

#include "cqd/optimizer.hpp"
#include "cqd/random_stream.hpp"
#include "cqd/report.hpp"
#include "cqd/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cqd {

struct SyntheticInstance {
    Tensor3 instance;
    Tensor3 target;
};

/// target = random Gaussian core times random orthonormal factors;
/// instance = target + noise_floor * standard Gaussian perturbation.
SyntheticInstance gen_synthetic(const Shape3& shape, const Ranks3& true_ranks, double noise_floor,
                                std::uint64_t seed);

/// Orthonormal n x p matrix from a standard Gaussian draw, via qr_retraction.
Matrix random_orthonormal(std::size_t n, std::size_t p, RandomStream& rng);

/// Matrix of independent standard normals.
Matrix random_gaussian(std::size_t rows, std::size_t cols, RandomStream& rng);

Tensor3 random_tensor(const Shape3& shape, RandomStream& rng);

struct ExperimentConfig {
    std::string id;
    Shape3 shape{6, 6, 6};
    Ranks3 ranks{2, 2, 2};
    double sigma = 0.1;
    std::vector<std::uint64_t> seeds;
    std::uint64_t iterations = 5000;
    std::vector<double> eps_grid;
    double eps0 = 0.1;
    std::uint64_t tau = 8;
    std::vector<double> lambdas;
    double noise_floor = 0.05;
    double eta0 = 0.5;
    double k0 = 100.0;
    /// Random projectors per seed (projopt) or Monte-Carlo draws per m (ensemble).
    std::uint64_t samples = 0;
    std::vector<std::uint32_t> ensemble_sizes;
    /// Matrix size for projopt.
    std::size_t mat_rows = 6;
    std::size_t mat_cols = 8;
};

/// Defaults for each experiment id: projopt, tailbound, converge, ratedist,
/// ensemble. Throws ArgumentError for unknown ids.
ExperimentConfig default_config(const std::string& id);

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

Report exp_projector_optimality(const ExperimentConfig& cfg);
Report exp_tail_bound(const ExperimentConfig& cfg);
Report exp_convergence(const ExperimentConfig& cfg);
Report exp_rate_distortion(const ExperimentConfig& cfg);
Report exp_ensemble_variance(const ExperimentConfig& cfg);

/// Dispatch by cfg.id.
Report run_experiment(const ExperimentConfig& cfg);

/// One row per iteration.
Report trace_report(const RunTrace& trace, const std::string& name);

}  // namespace cqd
