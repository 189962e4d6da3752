// SPDX-License-Identifier: MIT
#pragma once

#include "cqd/codec.hpp"
#include "cqd/tensor.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace cqd {

enum class MeanMap {
    /// Returns the task target.
    IdentityCompletion,
    /// Returns the task target minus the query core lifted into the ambient
    /// shape (see lift_core).
    Residual,
};

struct OracleConfig {
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    MeanMap mean_map = MeanMap::IdentityCompletion;
};

struct OracleResponse {
    Tensor3 payload;
    std::uint32_t query_checksum_echo = 0;
    std::uint32_t draws_used = 0;
};

/// Caller-owned draw counter. Every draw consumes one index; concurrent
/// callers must never share an index.
struct DrawCounter {
    std::uint64_t next = 0;
    std::uint64_t take() noexcept { return next++; }
};

enum class Aggregator { Mean, Median };

/// Backend-agnostic oracle surface.
class Oracle {
public:
    virtual ~Oracle() = default;
    virtual OracleResponse infer(std::span<const std::uint8_t> query, std::uint64_t draw_index) const = 0;
};

/// Simulated oracle R = Rbar(Q) + xi. xi is isotropic Gaussian with
/// per-coordinate std noise_sigma / sqrt(payload size), so E|xi|^2 equals
/// noise_sigma^2. The noise for a draw is a pure function of
/// (seed, query checksum, draw index).
class SimulatedOracle final : public Oracle {
public:
    explicit SimulatedOracle(OracleConfig cfg);

    /// Targets are looked up by the query's task_id.
    void register_task(std::uint32_t task_id, Tensor3 target);

    [[nodiscard]] const OracleConfig& config() const noexcept { return cfg_; }

    /// Throws ProtocolError (or a subclass) for undecodable queries or
    /// unknown task ids.
    OracleResponse infer(std::span<const std::uint8_t> query, std::uint64_t draw_index) const override;

    /// Noise-free response.
    Tensor3 mean_response(const Query& q) const;

private:
    OracleConfig cfg_;
    std::map<std::uint32_t, Tensor3> targets_;
};

/// Places the core in the leading r1 x r2 x r3 block of a zero tensor of the
/// given ambient shape.
Tensor3 lift_core(const Tensor3& core, const Shape3& ambient);

OracleResponse oracle_infer(const Oracle& oracle, std::span<const std::uint8_t> query, DrawCounter& counter);

/// m independent draws on the same query, aggregated elementwise.
OracleResponse ensemble_infer(const Oracle& oracle, std::span<const std::uint8_t> query, std::uint32_t m,
                              Aggregator agg, DrawCounter& counter);

/// Elementwise mean or median. Throws ArgumentError on an empty list or
/// mixed shapes.
Tensor3 aggregate(std::span<const Tensor3> payloads, Aggregator method);

}  // namespace cqd
