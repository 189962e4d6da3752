// SPDX-License-Identifier: MIT
#pragma once

#include "cqd/masking.hpp"
#include "cqd/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cqd {

// Wire layout (all integers little-endian):
//   offset  size  field
//        0     1  version (= 1)
//        1     6  ranks r1, r2, r3 as uint16
//        7     4  eps as uint32, round(eps * 1e6)
//       11     4  task_id uint32
//       15     8  seed uint64
//       23  8*r1r2r3  core, IEEE-754 binary64, row-major over (i, j, k)
//      end     4  CRC-32 (IEEE, reflected) over all preceding bytes
inline constexpr std::uint8_t kQueryVersion = 1;
inline constexpr std::size_t kQueryHeaderBytes = 23;
inline constexpr std::size_t kQueryChecksumBytes = 4;
inline constexpr double kEpsScale = 1e6;

using Bytes = std::vector<std::uint8_t>;

/// Decoded query.
struct Query {
    std::uint8_t version = kQueryVersion;
    Ranks3 ranks{0, 0, 0};
    std::uint32_t eps_fixed = 0;  // eps scaled by kEpsScale
    std::uint32_t task_id = 0;
    std::uint64_t seed = 0;
    Tensor3 core;
    std::uint32_t checksum = 0;

    [[nodiscard]] double eps() const noexcept { return eps_fixed / kEpsScale; }
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept;

Bytes encode(const CompressedState& cs, std::uint32_t task_id, std::uint64_t seed, double eps);

/// Lower-level encoder from a bare core; ranks are the core's shape.
Bytes encode_core(const Tensor3& core, std::uint32_t task_id, std::uint64_t seed, double eps);

/// Throws FramingError, IntegrityError or VersionError.
Query decode(std::span<const std::uint8_t> bytes);

/// Total encoded size of a query with the given ranks.
[[nodiscard]] constexpr std::size_t query_size(const Ranks3& r) noexcept {
    return kQueryHeaderBytes + 8 * r[0] * r[1] * r[2] + kQueryChecksumBytes;
}

/// Total byte length of a valid encoded query.
std::size_t query_budget_bytes(std::span<const std::uint8_t> bytes);

/// Payload bytes (8 * r1 r2 r3) of a valid encoded query.
std::size_t query_payload_bytes(std::span<const std::uint8_t> bytes);

}  // namespace cqd
