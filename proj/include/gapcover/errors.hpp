#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gapcover {

/// Bad argument or out-of-domain configuration value.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// An enumeration or memory budget would be exceeded.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// Interval packing did not fit; carries the missing length.
class AllocationError : public std::runtime_error {
public:
    AllocationError(const std::string& what, std::int64_t deficit)
        : std::runtime_error(what), deficit(deficit) {}
    std::int64_t deficit;
};

/// Certification refused: some integers in [1, U] are in no assigned class.
class CoverageError : public std::runtime_error {
public:
    CoverageError(const std::string& what, std::vector<std::int64_t> witnesses)
        : std::runtime_error(what), witnesses(std::move(witnesses)) {}
    std::vector<std::int64_t> witnesses;
};

/// Malformed input file (certificate, config overlay).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gapcover
