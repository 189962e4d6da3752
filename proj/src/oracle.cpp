// SPDX-License-Identifier: MIT
#include "cqd/oracle.hpp"

#include "cqd/errors.hpp"
#include "cqd/random_stream.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cqd {

SimulatedOracle::SimulatedOracle(OracleConfig cfg) : cfg_(cfg) {
    if (!(cfg_.noise_sigma >= 0.0)) throw ArgumentError("noise_sigma must be nonnegative");
}

void SimulatedOracle::register_task(std::uint32_t task_id, Tensor3 target) {
    targets_.insert_or_assign(task_id, std::move(target));
}

Tensor3 lift_core(const Tensor3& core, const Shape3& ambient) {
    const Shape3& r = core.shape();
    for (std::size_t n = 0; n < 3; ++n) {
        if (r[n] > ambient[n]) throw ArgumentError("core does not fit in the ambient shape");
    }
    Tensor3 out(ambient);
    for (std::size_t i = 0; i < r[0]; ++i)
        for (std::size_t j = 0; j < r[1]; ++j)
            for (std::size_t k = 0; k < r[2]; ++k) out(i, j, k) = core(i, j, k);
    return out;
}

Tensor3 SimulatedOracle::mean_response(const Query& q) const {
    const auto it = targets_.find(q.task_id);
    if (it == targets_.end()) throw ProtocolError("unknown task id " + std::to_string(q.task_id));
    const Tensor3& target = it->second;
    switch (cfg_.mean_map) {
        case MeanMap::IdentityCompletion:
            return target;
        case MeanMap::Residual:
            try {
                return target - lift_core(q.core, target.shape());
            } catch (const ArgumentError&) {
                throw ProtocolError("query ranks exceed the task's ambient shape");
            }
    }
    throw ProtocolError("unsupported mean map");
}

OracleResponse SimulatedOracle::infer(std::span<const std::uint8_t> query, std::uint64_t draw_index) const {
    const Query q = decode(query);
    OracleResponse r;
    r.payload = mean_response(q);
    r.query_checksum_echo = q.checksum;
    r.draws_used = 1;
    if (cfg_.noise_sigma > 0.0 && r.payload.size() > 0) {
        RandomStream rng(mix64(cfg_.seed ^ mix64(q.checksum)), draw_index);
        const double coord_std = cfg_.noise_sigma / std::sqrt(static_cast<double>(r.payload.size()));
        for (double& v : r.payload.data()) v += coord_std * rng.normal();
    }
    return r;
}

OracleResponse oracle_infer(const Oracle& oracle, std::span<const std::uint8_t> query, DrawCounter& counter) {
    return oracle.infer(query, counter.take());
}

OracleResponse ensemble_infer(const Oracle& oracle, std::span<const std::uint8_t> query, std::uint32_t m,
                              Aggregator agg, DrawCounter& counter) {
    if (m == 0) throw ArgumentError("ensemble size must be at least 1");
    std::vector<Tensor3> payloads;
    payloads.reserve(m);
    std::uint32_t echo = 0;
    for (std::uint32_t i = 0; i < m; ++i) {
        OracleResponse r = oracle.infer(query, counter.take());
        echo = r.query_checksum_echo;
        payloads.push_back(std::move(r.payload));
    }
    OracleResponse out;
    out.payload = aggregate(payloads, agg);
    out.query_checksum_echo = echo;
    out.draws_used = m;
    return out;
}

Tensor3 aggregate(std::span<const Tensor3> payloads, Aggregator method) {
    if (payloads.empty()) throw ArgumentError("aggregate: no responses");
    const Shape3& shape = payloads.front().shape();
    for (const Tensor3& p : payloads) {
        if (p.shape() != shape) throw ArgumentError("aggregate: responses have mixed shapes");
    }
    if (payloads.size() == 1) return payloads.front();

    Tensor3 out(shape);
    const std::size_t count = payloads.size();
    if (method == Aggregator::Mean) {
        for (const Tensor3& p : payloads) out += p;
        out *= 1.0 / static_cast<double>(count);
        return out;
    }
    std::vector<double> column(count);
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = 0; j < count; ++j) column[j] = payloads[j].data()[i];
        std::sort(column.begin(), column.end());
        out.data()[i] = count % 2 == 1 ? column[count / 2] : 0.5 * (column[count / 2 - 1] + column[count / 2]);
    }
    return out;
}

}  // namespace cqd
