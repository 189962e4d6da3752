// SPDX-License-Identifier: MIT
#pragma once

#include "cqd/manifold.hpp"
#include "cqd/masking.hpp"
#include "cqd/oracle.hpp"
#include "cqd/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cqd {

enum class LossKind { Quadratic };

/// Delegated task. The target is what the oracle knows; the optimizer only
/// sees it through oracle responses (and the diagnostics in the trace).
struct TaskSpec {
    Tensor3 target;
    LossKind loss = LossKind::Quadratic;
    double lambda = 0.0;
    std::uint64_t tau = 0;
    std::uint32_t task_id = 0;
};

enum class ScheduleKind { RobbinsMonro, Constant };

/// Robbins-Monro: eta_k = eta0 / (1 + k / k0). Constant: eta_k = eta0.
struct StepSchedule {
    ScheduleKind kind = ScheduleKind::RobbinsMonro;
    double eta0 = 0.5;
    double k0 = 100.0;
};

double step_size(std::uint64_t k, const StepSchedule& s);

struct TraceRow {
    std::uint64_t k = 0;
    double loss = 0.0;               // f(X_k; R_k) = 0.5 |X_k - R_k|^2
    double objective = 0.0;          // 0.5 |X_k - T|^2, the noise-free part of F
    double grad_norm_sq = 0.0;       // |grad F(X_k)|^2
    double stoch_grad_norm_sq = 0.0; // |grad f(X_k; R_k)|^2
    Ranks3 ranks{0, 0, 0};           // ranks transmitted in Q_k
    std::uint64_t budget = 0;
    std::uint64_t budget_larger = 0; // budget one controller step down in eps
    double eta = 0.0;
    double eps = 0.0;
    std::uint64_t query_bytes = 0;
};

struct RunTrace {
    std::vector<TraceRow> rows;
    /// Objective at the last iterate (after the final update).
    double terminal_objective = 0.0;
};

struct RunResult {
    TuckerPoint point;
    RunTrace trace;
    /// Set when the run aborted early (e.g. rank deficiency in the retraction).
    std::optional<std::string> error;
};

/// Euclidean gradient of 0.5 |X - R|^2, i.e. X - R.
Tensor3 stochastic_grad(const Tensor3& x, const Tensor3& response, const TaskSpec& task);

/// Turns an oracle payload into a target estimate. For the residual mean map
/// the transmitted core is added back in its lifted position.
Tensor3 integrate_response(const Tensor3& payload, MeanMap map, const Tensor3& query_core);

struct RunOptions {
    EpsilonControllerParams controller{};
    /// Upper bound on controller steps applied within one iteration while the
    /// query is over budget.
    int max_controller_steps = 400;
};

RunResult run_cqd(const TuckerPoint& x0, const TaskSpec& task, const OracleConfig& oracle,
                  const StepSchedule& schedule, double eps0, std::uint64_t iterations,
                  const RunOptions& options = {});

RunResult run_cqd_ensemble(const TuckerPoint& x0, const TaskSpec& task, const OracleConfig& oracle,
                           const StepSchedule& schedule, double eps0, std::uint64_t iterations,
                           std::uint32_t m, Aggregator agg, const RunOptions& options = {});

struct DescentCertificate {
    std::size_t windows = 0;
    std::size_t violations = 0;
    double violation_rate = 0.0;
    /// Terminal objective exceeds the initial objective.
    bool diverged = false;
};

/// Empirical check of the expected-descent inequality
///   F_k - F_{k+1} >= (eta_k - L eta_k^2 / 2) |grad F_k|^2 - L eta_k^2 sigma^2 / 2 - slack,
/// summed over windows of `window` transitions. A window also counts as a
/// violation when any of its steps leaves the small-step regime
/// eta - L eta^2 / 2 >= eta / 2. The slack is `slack_sigmas` standard
/// deviations of the noise-driven terms for Gaussian oracle noise spread over
/// `payload_dim` coordinates (zero when sigma is zero).
DescentCertificate descent_certificate(const RunTrace& trace, double lipschitz, double sigma,
                                       std::size_t payload_dim, std::size_t window = 1,
                                       double slack_sigmas = 3.0);

/// Fraction of rows where loss + lambda * budget <= loss + lambda * budget_larger.
double lagrangian_consistency(const RunTrace& trace, double lambda);

}  // namespace cqd
