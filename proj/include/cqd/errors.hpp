// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace cqd {

/// Invalid shapes, indices, or parameters passed to a public operation.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A retraction or factorization lost rank below the fixed target rank.
class RankDeficiencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Base for wire-format failures.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FramingError : public ProtocolError {
public:
    using ProtocolError::ProtocolError;
};

class IntegrityError : public ProtocolError {
public:
    using ProtocolError::ProtocolError;
};

class VersionError : public ProtocolError {
public:
    using ProtocolError::ProtocolError;
};

class CapacityError : public ProtocolError {
public:
    using ProtocolError::ProtocolError;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cqd
