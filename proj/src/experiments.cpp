// SPDX-License-Identifier: MIT
#include "cqd/experiments.hpp"

#include "cqd/codec.hpp"
#include "cqd/errors.hpp"
#include "cqd/hosvd.hpp"
#include "cqd/manifold.hpp"
#include "cqd/masking.hpp"
#include "cqd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cqd {

namespace {

// Stream ids keep the experiments' random draws disjoint for a shared seed.
constexpr std::uint64_t kSyntheticTargetStream = 1;
constexpr std::uint64_t kSyntheticNoiseStream = 2;
constexpr std::uint64_t kProjoptStream = 3;
constexpr std::uint64_t kTailboundStream = 4;

constexpr double kGradThreshold = 1e-3;
constexpr double kDeterministicLoss = 1e-8;
constexpr std::uint64_t kDeterministicIters = 400;
constexpr double kDeterministicEta = 0.1;
constexpr double kDivergentEta = 3.0;
constexpr std::uint64_t kDivergentIters = 50;
constexpr std::uint64_t kControllerWarmup = 200;
constexpr std::size_t kCertificateWindow = 100;
constexpr double kMaxViolationRate = 0.05;
constexpr double kMinLagrangianRate = 0.9;
constexpr double kVarianceBandLow = 0.8;
constexpr double kVarianceBandHigh = 1.25;
constexpr double kTailSlack = 1e-9;

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
    std::vector<std::uint64_t> s(n);
    std::iota(s.begin(), s.end(), 0);
    return s;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Report start_report(const ExperimentConfig& cfg, std::vector<std::string> columns) {
    if (cfg.seeds.empty()) throw ArgumentError("experiment needs at least one seed");
    Report r;
    r.experiment = cfg.id;
    r.config = config_to_json(cfg);
    r.columns = std::move(columns);
    return r;
}

}  // namespace

Matrix random_gaussian(std::size_t rows, std::size_t cols, RandomStream& rng) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
    return m;
}

Matrix random_orthonormal(std::size_t n, std::size_t p, RandomStream& rng) {
    if (p > n) throw ArgumentError("random_orthonormal: p exceeds n");
    if (p == 0) return Matrix(static_cast<Eigen::Index>(n), 0);
    return qr_retraction(random_gaussian(n, p, rng)).matrix();
}

Tensor3 random_tensor(const Shape3& shape, RandomStream& rng) {
    Tensor3 x(shape);
    for (double& v : x.data()) v = rng.normal();
    return x;
}

SyntheticInstance gen_synthetic(const Shape3& shape, const Ranks3& true_ranks, double noise_floor,
                                std::uint64_t seed) {
    for (std::size_t n = 0; n < 3; ++n) {
        if (shape[n] == 0) throw ArgumentError("gen_synthetic: shape must be positive");
        if (true_ranks[n] > shape[n]) throw ArgumentError("gen_synthetic: rank exceeds dimension");
    }
    if (!(noise_floor >= 0.0)) throw ArgumentError("gen_synthetic: noise_floor must be nonnegative");

    RandomStream rng(mix64(seed), kSyntheticTargetStream);
    const Tensor3 core = random_tensor(true_ranks, rng);
    std::array<Matrix, 3> factors;
    for (std::size_t n = 0; n < 3; ++n) factors[n] = random_orthonormal(shape[n], true_ranks[n], rng);

    SyntheticInstance out;
    out.target = tucker_to_tensor(core, factors);
    out.instance = out.target;
    if (noise_floor > 0.0) {
        RandomStream noise(mix64(seed), kSyntheticNoiseStream);
        for (double& v : out.instance.data()) v += noise_floor * noise.normal();
    }
    return out;
}

ExperimentConfig default_config(const std::string& id) {
    ExperimentConfig c;
    c.id = id;
    if (id == "projopt") {
        c.seeds = seed_range(20);
        c.ranks = {2, 2, 2};
        c.samples = 500;
        c.mat_rows = 6;
        c.mat_cols = 8;
    } else if (id == "tailbound") {
        c.seeds = seed_range(100);
        c.shape = {5, 5, 5};
    } else if (id == "converge") {
        c.seeds = seed_range(10);
        c.shape = {6, 6, 6};
        c.ranks = {2, 2, 2};
        c.sigma = 0.1;
        c.iterations = 5000;
        c.eta0 = 0.5;
        c.k0 = 100.0;
        c.eps0 = 0.1;
        c.tau = 8;
        c.noise_floor = 0.1;
        c.lambdas = {0.01};
    } else if (id == "ratedist") {
        c.seeds = seed_range(10);
        c.shape = {6, 6, 6};
        c.ranks = {2, 2, 2};
        c.noise_floor = 0.05;
        c.lambdas = {0.001, 0.01, 0.1};
        const std::size_t points = 50;
        const double hi = std::log(0.99);
        const double lo = std::log(1e-4);
        for (std::size_t i = 0; i < points; ++i)
            c.eps_grid.push_back(std::exp(hi + (lo - hi) * static_cast<double>(i) / static_cast<double>(points - 1)));
    } else if (id == "ensemble") {
        c.seeds = seed_range(10);
        c.shape = {4, 4, 4};
        c.ranks = {2, 2, 2};
        c.sigma = 0.5;
        c.samples = 2000;
        c.eps0 = 0.1;
        c.ensemble_sizes = {1, 4, 16, 64};
    } else {
        throw ArgumentError("unknown experiment '" + id + "'");
    }
    return c;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["id"] = c.id;
    j["shape"] = c.shape;
    j["ranks"] = c.ranks;
    j["sigma"] = c.sigma;
    j["seeds"] = c.seeds;
    j["iterations"] = c.iterations;
    j["eps_grid"] = c.eps_grid;
    j["eps0"] = c.eps0;
    j["tau"] = c.tau;
    j["lambdas"] = c.lambdas;
    j["noise_floor"] = c.noise_floor;
    j["eta0"] = c.eta0;
    j["k0"] = c.k0;
    j["samples"] = c.samples;
    j["ensemble_sizes"] = c.ensemble_sizes;
    j["matrix"] = {c.mat_rows, c.mat_cols};
    return j;
}

Report exp_projector_optimality(const ExperimentConfig& cfg) {
    Report r = start_report(cfg, {"seed", "rank", "optimal_residual", "min_random_residual", "violations", "samples"});
    const std::size_t rank = cfg.ranks[0];
    if (rank > cfg.mat_rows) throw ArgumentError("projopt: rank exceeds matrix rows");
    double total_violations = 0.0;
    for (std::uint64_t seed : cfg.seeds) {
        RandomStream rng(mix64(seed), kProjoptStream);
        const Matrix a = random_gaussian(cfg.mat_rows, cfg.mat_cols, rng);
        const double tol = 1e-12 * std::max(1.0, a.norm());
        const Matrix top = left_singular(a).u.leftCols(static_cast<Eigen::Index>(rank));
        const double optimal = (a - top * (top.transpose() * a)).norm();

        double best_random = std::numeric_limits<double>::infinity();
        double violations = 0.0;
        for (std::uint64_t i = 0; i < cfg.samples; ++i) {
            const Matrix v = random_orthonormal(cfg.mat_rows, rank, rng);
            const double res = (a - v * (v.transpose() * a)).norm();
            best_random = std::min(best_random, res);
            if (res < optimal - tol) violations += 1.0;
        }
        if (cfg.samples == 0) best_random = optimal;
        total_violations += violations;
        r.rows.push_back({static_cast<double>(seed), static_cast<double>(rank), optimal, best_random, violations,
                          static_cast<double>(cfg.samples)});
    }
    r.checks.push_back({"zero_violations", total_violations == 0.0, total_violations, 0.0});
    return r;
}

Report exp_tail_bound(const ExperimentConfig& cfg) {
    Report r = start_report(cfg, {"seed", "I", "J", "K", "rank_triples", "violations", "max_ratio"});
    double total_violations = 0.0;
    for (std::uint64_t seed : cfg.seeds) {
        RandomStream rng(mix64(seed), kTailboundStream);
        Shape3 shape{};
        for (std::size_t n = 0; n < 3; ++n) {
            if (cfg.shape[n] == 0) throw ArgumentError("tailbound: shape must be positive");
            shape[n] = 1 + static_cast<std::size_t>(rng.next_u64() % cfg.shape[n]);
        }
        const Tensor3 x = random_tensor(shape, rng);
        const HosvdFactorization f = hosvd(x);
        double triples = 0.0;
        double violations = 0.0;
        double max_ratio = 0.0;
        for (std::size_t r1 = 0; r1 <= shape[0]; ++r1)
            for (std::size_t r2 = 0; r2 <= shape[1]; ++r2)
                for (std::size_t r3 = 0; r3 <= shape[2]; ++r3) {
                    const Ranks3 ranks{r1, r2, r3};
                    const double residual = (x - truncated_reconstruct(f, ranks)).squared_norm();
                    const double tail = tail_energy(f, ranks);
                    triples += 1.0;
                    if (residual > tail + kTailSlack) violations += 1.0;
                    if (tail > 1e-12) max_ratio = std::max(max_ratio, residual / tail);
                }
        total_violations += violations;
        r.rows.push_back({static_cast<double>(seed), static_cast<double>(shape[0]), static_cast<double>(shape[1]),
                          static_cast<double>(shape[2]), triples, violations, max_ratio});
    }
    r.checks.push_back({"zero_violations", total_violations == 0.0, total_violations, 0.0});
    return r;
}

Report exp_convergence(const ExperimentConfig& cfg) {
    Report r = start_report(cfg, {"seed", "crossing_iter", "final_running_min", "terminal_objective",
                                  "max_budget_after_warmup", "certificate_violation_rate", "lagrangian_rate"});
    const std::size_t payload_dim = volume(cfg.shape);
    const StepSchedule rm{ScheduleKind::RobbinsMonro, cfg.eta0, cfg.k0};

    auto setup = [&](std::uint64_t seed) {
        const SyntheticInstance inst = gen_synthetic(cfg.shape, cfg.ranks, cfg.noise_floor, seed);
        TaskSpec task;
        task.target = inst.target;
        task.tau = cfg.tau;
        task.lambda = cfg.lambdas.empty() ? 0.0 : cfg.lambdas.front();
        task.task_id = static_cast<std::uint32_t>(seed);
        return std::pair{tucker_project(inst.instance, cfg.ranks), task};
    };

    std::vector<double> running_mins;
    bool budget_ok = true;
    double worst_violation_rate = 0.0;
    double worst_lagrangian = 1.0;
    for (std::uint64_t seed : cfg.seeds) {
        const auto [x0, task] = setup(seed);
        const OracleConfig ocfg{cfg.sigma, seed, MeanMap::IdentityCompletion};
        const RunResult run = run_cqd(x0, task, ocfg, rm, cfg.eps0, cfg.iterations);

        double running_min = std::numeric_limits<double>::infinity();
        double crossing = -1.0;
        double max_budget = 0.0;
        for (const TraceRow& row : run.trace.rows) {
            running_min = std::min(running_min, row.grad_norm_sq);
            if (crossing < 0.0 && running_min < kGradThreshold) crossing = static_cast<double>(row.k);
            if (row.k >= kControllerWarmup) max_budget = std::max(max_budget, static_cast<double>(row.budget));
        }
        if (run.error || max_budget > static_cast<double>(cfg.tau)) budget_ok = false;
        const DescentCertificate cert =
            descent_certificate(run.trace, 1.0, cfg.sigma, payload_dim, kCertificateWindow);
        worst_violation_rate = std::max(worst_violation_rate, cert.violation_rate);
        double lagr = 1.0;
        for (double lambda : cfg.lambdas) {
            if (lambda > 0.0) lagr = std::min(lagr, lagrangian_consistency(run.trace, lambda));
        }
        worst_lagrangian = std::min(worst_lagrangian, lagr);
        running_mins.push_back(running_min);
        r.rows.push_back({static_cast<double>(seed), crossing, running_min, run.trace.terminal_objective, max_budget,
                          cert.violation_rate, lagr});
    }
    const double med = median(running_mins);
    r.checks.push_back({"median_running_min_grad_sq", med < kGradThreshold, med, kGradThreshold});

    // Deterministic contraction and the divergent negative control on the first seed.
    const auto [x0, task] = setup(cfg.seeds.front());
    const OracleConfig quiet{0.0, cfg.seeds.front(), MeanMap::IdentityCompletion};
    const RunResult det = run_cqd(x0, task, quiet, {ScheduleKind::Constant, kDeterministicEta, 1.0}, cfg.eps0,
                                  kDeterministicIters);
    double first_below = -1.0;
    for (const TraceRow& row : det.trace.rows) {
        if (row.objective < kDeterministicLoss) {
            first_below = static_cast<double>(row.k);
            break;
        }
    }
    if (first_below < 0.0 && !det.error && det.trace.terminal_objective < kDeterministicLoss)
        first_below = static_cast<double>(kDeterministicIters);
    r.checks.push_back({"deterministic_loss_below_1e-8_within_400", first_below >= 0.0, first_below,
                        static_cast<double>(kDeterministicIters)});
    const DescentCertificate det_cert = descent_certificate(det.trace, 1.0, 0.0, payload_dim, 1);
    r.checks.push_back({"deterministic_descent_certificate", det_cert.violations == 0,
                        static_cast<double>(det_cert.violations), 0.0});

    const RunResult bad = run_cqd(x0, task, quiet, {ScheduleKind::Constant, kDivergentEta, 1.0}, cfg.eps0,
                                  kDivergentIters);
    const DescentCertificate bad_cert = descent_certificate(bad.trace, 1.0, 0.0, payload_dim, 1);
    const bool diverged = bad.error.has_value() || bad_cert.diverged;
    r.checks.push_back({"negative_control_diverges", diverged && bad_cert.violation_rate == 1.0,
                        bad_cert.violation_rate, 1.0});

    r.checks.push_back({"budget_feasible_after_warmup", budget_ok, budget_ok ? 1.0 : 0.0, 1.0});
    r.checks.push_back({"descent_certificate_violation_rate", worst_violation_rate <= kMaxViolationRate,
                        worst_violation_rate, kMaxViolationRate});
    r.checks.push_back({"lagrangian_consistency", worst_lagrangian >= kMinLagrangianRate, worst_lagrangian,
                        kMinLagrangianRate});
    return r;
}

Report exp_rate_distortion(const ExperimentConfig& cfg) {
    std::vector<std::string> columns{"seed", "grid_index", "eps", "r1", "r2", "r3", "budget", "distortion"};
    for (double lambda : cfg.lambdas) columns.push_back("lagrangian_" + format_double(lambda));
    Report r = start_report(cfg, std::move(columns));
    if (cfg.eps_grid.empty()) throw ArgumentError("ratedist: empty eps grid");

    std::vector<double> grid = cfg.eps_grid;
    std::sort(grid.begin(), grid.end(), std::greater<>());

    bool monotone = true;
    double worst_full_rank = 0.0;
    bool full_rank_reached = true;
    for (std::uint64_t seed : cfg.seeds) {
        const SyntheticInstance inst = gen_synthetic(cfg.shape, cfg.ranks, cfg.noise_floor, seed);
        const Tensor3& x = inst.instance;
        const HosvdFactorization f = hosvd(x);
        const double tol = 1e-12 * std::max(1.0, x.squared_norm());
        double prev_budget = -1.0;
        double prev_distortion = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const CompressedState cs = asm_compress(x, f, grid[g]);
            const Ranks3& rk = cs.maskset.ranks;
            const double b = static_cast<double>(budget(rk));
            const double distortion = (x - cs.masked).squared_norm();
            if (b < prev_budget || distortion > prev_distortion + tol) monotone = false;
            prev_budget = b;
            prev_distortion = distortion;
            std::vector<double> row{static_cast<double>(seed), static_cast<double>(g), grid[g],
                                    static_cast<double>(rk[0]), static_cast<double>(rk[1]),
                                    static_cast<double>(rk[2]), b, distortion};
            for (double lambda : cfg.lambdas) row.push_back(distortion + lambda * b);
            r.rows.push_back(std::move(row));
            if (g + 1 == grid.size()) {
                if (rk != x.shape()) full_rank_reached = false;
                worst_full_rank = std::max(worst_full_rank, distortion);
            }
        }
    }
    r.checks.push_back({"frontier_monotone", monotone, monotone ? 1.0 : 0.0, 1.0});
    r.checks.push_back({"smallest_eps_full_rank_exact", full_rank_reached && worst_full_rank <= 1e-18,
                        worst_full_rank, 1e-18});

    const double ratio = static_cast<double>(query_size({2, 2, 2}) - kQueryHeaderBytes - kQueryChecksumBytes) /
                         static_cast<double>(query_size({20, 20, 20}) - kQueryHeaderBytes - kQueryChecksumBytes);
    r.checks.push_back({"payload_ratio_2_in_20", std::abs(ratio - 1e-3) <= 1e-15, ratio, 1e-3});
    return r;
}

Report exp_ensemble_variance(const ExperimentConfig& cfg) {
    Report r = start_report(cfg, {"seed", "m", "variance", "expected", "ratio"});
    if (cfg.ensemble_sizes.empty()) throw ArgumentError("ensemble: no ensemble sizes");
    if (cfg.samples < 2) throw ArgumentError("ensemble: need at least two draws per size");

    bool in_band = true;
    bool decreasing = true;
    double worst_ratio_gap = 0.0;
    for (std::uint64_t seed : cfg.seeds) {
        const SyntheticInstance inst = gen_synthetic(cfg.shape, cfg.ranks, cfg.noise_floor, seed);
        const std::uint32_t task_id = static_cast<std::uint32_t>(seed);
        SimulatedOracle oracle({cfg.sigma, seed, MeanMap::IdentityCompletion});
        oracle.register_task(task_id, inst.target);
        const Bytes query = encode(asm_compress(inst.instance, cfg.eps0), task_id, seed, cfg.eps0);
        DrawCounter counter;

        double prev = std::numeric_limits<double>::infinity();
        for (std::uint32_t m : cfg.ensemble_sizes) {
            std::vector<Tensor3> aggregates;
            aggregates.reserve(cfg.samples);
            for (std::uint64_t t = 0; t < cfg.samples; ++t)
                aggregates.push_back(ensemble_infer(oracle, query, m, Aggregator::Mean, counter).payload);
            // Running mean: exact when all aggregates coincide.
            Tensor3 centre = aggregates.front();
            for (std::size_t t = 1; t < aggregates.size(); ++t)
                centre += (1.0 / static_cast<double>(t + 1)) * (aggregates[t] - centre);
            double ss = 0.0;
            for (const Tensor3& a : aggregates) ss += (a - centre).squared_norm();
            const double variance = ss / static_cast<double>(cfg.samples - 1);
            const double expected = cfg.sigma * cfg.sigma / static_cast<double>(m);
            double ratio = 0.0;
            if (expected > 0.0) {
                ratio = variance / expected;
                if (ratio < kVarianceBandLow || ratio > kVarianceBandHigh) in_band = false;
                worst_ratio_gap = std::max(worst_ratio_gap, std::abs(ratio - 1.0));
                if (!(variance < prev)) decreasing = false;
            } else if (variance != 0.0) {
                in_band = false;
            }
            prev = variance;
            r.rows.push_back({static_cast<double>(seed), static_cast<double>(m), variance, expected, ratio});
        }
    }
    r.checks.push_back({"variance_ratio_in_band", in_band, worst_ratio_gap, kVarianceBandHigh - 1.0});
    if (cfg.sigma > 0.0) r.checks.push_back({"variance_strictly_decreasing", decreasing, decreasing ? 1.0 : 0.0, 1.0});
    return r;
}

Report run_experiment(const ExperimentConfig& cfg) {
    if (cfg.id == "projopt") return exp_projector_optimality(cfg);
    if (cfg.id == "tailbound") return exp_tail_bound(cfg);
    if (cfg.id == "converge") return exp_convergence(cfg);
    if (cfg.id == "ratedist") return exp_rate_distortion(cfg);
    if (cfg.id == "ensemble") return exp_ensemble_variance(cfg);
    throw ArgumentError("unknown experiment '" + cfg.id + "'");
}

Report trace_report(const RunTrace& trace, const std::string& name) {
    Report r;
    r.experiment = name;
    r.columns = {"k",  "loss",   "objective",     "grad_norm_sq", "stoch_grad_norm_sq", "r1", "r2",
                 "r3", "budget", "budget_larger", "eta",          "eps",                "query_bytes"};
    for (const TraceRow& t : trace.rows) {
        r.rows.push_back({static_cast<double>(t.k), t.loss, t.objective, t.grad_norm_sq, t.stoch_grad_norm_sq,
                          static_cast<double>(t.ranks[0]), static_cast<double>(t.ranks[1]),
                          static_cast<double>(t.ranks[2]), static_cast<double>(t.budget),
                          static_cast<double>(t.budget_larger), t.eta, t.eps, static_cast<double>(t.query_bytes)});
    }
    return r;
}

}  // namespace cqd
