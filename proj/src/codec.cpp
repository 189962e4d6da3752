// SPDX-License-Identifier: MIT
#include "cqd/codec.hpp"

#include "cqd/errors.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

namespace cqd {

namespace {

template <typename T>
void put_le(Bytes& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t offset) {
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(in[offset + i]) << (8 * i);
    return value;
}

std::uint32_t eps_to_fixed(double eps) {
    if (!(eps >= 0.0) || eps * kEpsScale > std::numeric_limits<std::uint32_t>::max()) {
        throw ArgumentError("eps out of range for the query header");
    }
    return static_cast<std::uint32_t>(std::llround(eps * kEpsScale));
}

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    crc = ::crc32_z(crc, bytes.data(), bytes.size());
    return static_cast<std::uint32_t>(crc);
}

Bytes encode_core(const Tensor3& core, std::uint32_t task_id, std::uint64_t seed, double eps) {
    const Ranks3& r = core.shape();
    for (std::size_t n = 0; n < 3; ++n) {
        if (r[n] > std::numeric_limits<std::uint16_t>::max()) {
            throw CapacityError("rank " + std::to_string(r[n]) + " does not fit the 16-bit rank field");
        }
    }
    Bytes out;
    out.reserve(query_size(r));
    out.push_back(kQueryVersion);
    for (std::size_t n = 0; n < 3; ++n) put_le(out, static_cast<std::uint16_t>(r[n]));
    put_le(out, eps_to_fixed(eps));
    put_le(out, task_id);
    put_le(out, seed);
    for (double v : core.data()) put_le(out, std::bit_cast<std::uint64_t>(v));
    put_le(out, crc32(out));
    return out;
}

Bytes encode(const CompressedState& cs, std::uint32_t task_id, std::uint64_t seed, double eps) {
    return encode_core(cs.masked_core, task_id, seed, eps);
}

Query decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kQueryHeaderBytes + kQueryChecksumBytes) {
        throw FramingError("query is " + std::to_string(bytes.size()) + " bytes, shorter than the fixed frame");
    }
    Query q;
    for (std::size_t n = 0; n < 3; ++n) q.ranks[n] = get_le<std::uint16_t>(bytes, 1 + 2 * n);
    if (bytes.size() != query_size(q.ranks)) {
        throw FramingError("query length " + std::to_string(bytes.size()) + " does not match ranks (expected " +
                           std::to_string(query_size(q.ranks)) + ")");
    }
    const std::size_t body = bytes.size() - kQueryChecksumBytes;
    q.checksum = get_le<std::uint32_t>(bytes, body);
    if (crc32(bytes.first(body)) != q.checksum) throw IntegrityError("query checksum mismatch");
    q.version = bytes[0];
    if (q.version != kQueryVersion) throw VersionError("unsupported query version " + std::to_string(q.version));

    q.eps_fixed = get_le<std::uint32_t>(bytes, 7);
    q.task_id = get_le<std::uint32_t>(bytes, 11);
    q.seed = get_le<std::uint64_t>(bytes, 15);

    std::vector<double> values(volume(q.ranks));
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = std::bit_cast<double>(get_le<std::uint64_t>(bytes, kQueryHeaderBytes + 8 * i));
    try {
        q.core = Tensor3(q.ranks, std::move(values));
    } catch (const ArgumentError&) {
        throw IntegrityError("query core contains non-finite values");
    }
    return q;
}

std::size_t query_budget_bytes(std::span<const std::uint8_t> bytes) { return query_size(decode(bytes).ranks); }

std::size_t query_payload_bytes(std::span<const std::uint8_t> bytes) { return 8 * volume(decode(bytes).ranks); }

}  // namespace cqd
