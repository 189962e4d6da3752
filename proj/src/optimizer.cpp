// SPDX-License-Identifier: MIT
#include "cqd/optimizer.hpp"

#include "cqd/codec.hpp"
#include "cqd/errors.hpp"
#include "cqd/hosvd.hpp"

#include <algorithm>
#include <cmath>

namespace cqd {

double step_size(std::uint64_t k, const StepSchedule& s) {
    if (!(s.eta0 > 0.0)) throw ArgumentError("eta0 must be positive");
    switch (s.kind) {
        case ScheduleKind::Constant:
            return s.eta0;
        case ScheduleKind::RobbinsMonro:
            if (!(s.k0 > 0.0)) throw ArgumentError("k0 must be positive");
            return s.eta0 / (1.0 + static_cast<double>(k) / s.k0);
    }
    throw ArgumentError("unknown schedule kind");
}

Tensor3 stochastic_grad(const Tensor3& x, const Tensor3& response, const TaskSpec& task) {
    if (task.loss != LossKind::Quadratic) throw ArgumentError("only the quadratic loss is supported");
    if (x.shape() != response.shape()) throw ArgumentError("stochastic_grad: response shape mismatch");
    return x - response;
}

Tensor3 integrate_response(const Tensor3& payload, MeanMap map, const Tensor3& query_core) {
    switch (map) {
        case MeanMap::IdentityCompletion:
            return payload;
        case MeanMap::Residual:
            return payload + lift_core(query_core, payload.shape());
    }
    throw ArgumentError("unknown mean map");
}

namespace {

RunResult run_loop(const TuckerPoint& x0, const TaskSpec& task, const OracleConfig& ocfg, const StepSchedule& schedule,
                   double eps0, std::uint64_t iterations, std::uint32_t ensemble, Aggregator agg,
                   const RunOptions& options) {
    if (iterations == 0) throw ArgumentError("run_cqd needs at least one iteration");
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw ArgumentError("eps0 must lie in (0, 1)");
    if (task.target.shape() != x0.shape()) throw ArgumentError("task target does not match the iterate shape");
    if (!(task.lambda >= 0.0)) throw ArgumentError("lambda must be nonnegative");

    SimulatedOracle oracle(ocfg);
    oracle.register_task(task.task_id, task.target);
    DrawCounter counter;
    const EpsilonControllerParams& ctl = options.controller;

    RunResult result{x0, {}, std::nullopt};
    result.trace.rows.reserve(static_cast<std::size_t>(iterations));
    double eps = std::clamp(eps0, ctl.eps_min, ctl.eps_max);

    for (std::uint64_t k = 0; k < iterations; ++k) {
        const TuckerPoint& x = result.point;
        const Tensor3 xt = x.to_tensor();
        const HosvdFactorization f = hosvd(xt);

        // Raise eps until the query fits the budget.
        SpectralMaskSet masks = select_masks(f, eps);
        for (int step = 0; budget(masks.ranks) > task.tau && eps < ctl.eps_max && step < options.max_controller_steps;
             ++step) {
            eps = adapt_epsilon(eps, budget(masks.ranks), task.tau, ctl);
            masks = select_masks(f, eps);
        }

        const CompressedState cs = asm_compress(xt, f, eps);
        const Bytes query = encode(cs, task.task_id, ocfg.seed, eps);
        const OracleResponse response = ensemble == 0 ? oracle_infer(oracle, query, counter)
                                                      : ensemble_infer(oracle, query, ensemble, agg, counter);
        const Tensor3 estimate = integrate_response(response.payload, ocfg.mean_map, cs.masked_core);

        const Tensor3 egrad = stochastic_grad(xt, estimate, task);
        const TuckerTangent direction = riemannian_grad_tucker(x, egrad);
        const Tensor3 residual = xt - task.target;

        TraceRow row;
        row.k = k;
        row.loss = 0.5 * egrad.squared_norm();
        row.objective = 0.5 * residual.squared_norm();
        row.grad_norm_sq = embed_tangent(x, riemannian_grad_tucker(x, residual)).squared_norm();
        row.stoch_grad_norm_sq = embed_tangent(x, direction).squared_norm();
        row.ranks = cs.maskset.ranks;
        row.budget = budget(cs.maskset.ranks);
        row.budget_larger = budget(select_masks(f, std::clamp(eps * ctl.down, ctl.eps_min, ctl.eps_max)).ranks);
        row.eta = step_size(k, schedule);
        row.eps = eps;
        row.query_bytes = query.size();
        result.trace.rows.push_back(row);

        TuckerTangent descent = direction;
        descent.core_dir *= -1.0;
        for (Matrix& v : descent.factor_dirs) v *= -1.0;
        try {
            result.point = tucker_retract(x, descent, row.eta);
        } catch (const RankDeficiencyError& e) {
            result.error = std::string("rank deficiency at iteration ") + std::to_string(k) + ": " + e.what();
            break;
        }
        eps = adapt_epsilon(eps, row.budget, task.tau, ctl);
    }
    result.trace.terminal_objective = 0.5 * (result.point.to_tensor() - task.target).squared_norm();
    return result;
}

}  // namespace

RunResult run_cqd(const TuckerPoint& x0, const TaskSpec& task, const OracleConfig& oracle,
                  const StepSchedule& schedule, double eps0, std::uint64_t iterations, const RunOptions& options) {
    return run_loop(x0, task, oracle, schedule, eps0, iterations, 0, Aggregator::Mean, options);
}

RunResult run_cqd_ensemble(const TuckerPoint& x0, const TaskSpec& task, const OracleConfig& oracle,
                           const StepSchedule& schedule, double eps0, std::uint64_t iterations, std::uint32_t m,
                           Aggregator agg, const RunOptions& options) {
    if (m == 0) throw ArgumentError("ensemble size must be at least 1");
    return run_loop(x0, task, oracle, schedule, eps0, iterations, m, agg, options);
}

DescentCertificate descent_certificate(const RunTrace& trace, double lipschitz, double sigma,
                                       std::size_t payload_dim, std::size_t window, double slack_sigmas) {
    if (window == 0) throw ArgumentError("window must be positive");
    if (payload_dim == 0) throw ArgumentError("payload_dim must be positive");
    DescentCertificate cert;
    const auto& rows = trace.rows;
    if (rows.empty()) return cert;

    const double d = static_cast<double>(payload_dim);
    const double s2 = sigma * sigma;
    for (std::size_t start = 0; start < rows.size(); start += window) {
        const std::size_t end = std::min(rows.size(), start + window);
        double decrease = 0.0;
        double bound = 0.0;
        double variance = 0.0;
        double roundoff = 0.0;
        bool small_step = true;
        for (std::size_t k = start; k < end; ++k) {
            const double eta = rows[k].eta;
            const double next = k + 1 < rows.size() ? rows[k + 1].objective : trace.terminal_objective;
            const double coeff = eta - 0.5 * lipschitz * eta * eta;
            decrease += rows[k].objective - next;
            bound += coeff * rows[k].grad_norm_sq - 0.5 * lipschitz * eta * eta * s2;
            variance += eta * eta * rows[k].grad_norm_sq * s2 / d + std::pow(eta, 4) * s2 * s2 / (2.0 * d);
            roundoff += 1e-12 * (1.0 + std::abs(rows[k].objective));
            small_step = small_step && coeff >= 0.5 * eta;
        }
        ++cert.windows;
        const double slack = slack_sigmas * std::sqrt(variance) + roundoff;
        if (!small_step || decrease < bound - slack) ++cert.violations;
    }
    cert.violation_rate = static_cast<double>(cert.violations) / static_cast<double>(cert.windows);
    cert.diverged = !(trace.terminal_objective <= rows.front().objective);
    return cert;
}

double lagrangian_consistency(const RunTrace& trace, double lambda) {
    if (trace.rows.empty()) return 1.0;
    std::size_t ok = 0;
    for (const TraceRow& r : trace.rows) {
        const double accepted = r.loss + lambda * static_cast<double>(r.budget);
        const double larger = r.loss + lambda * static_cast<double>(r.budget_larger);
        if (accepted <= larger) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(trace.rows.size());
}

}  // namespace cqd
