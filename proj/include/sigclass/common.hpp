#ifndef SIGCLASS_COMMON_HPP
#define SIGCLASS_COMMON_HPP

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sigclass {

// Bins 1..300 Hz of a 1 s block; DC is dropped.
inline constexpr int kNumBins = 300;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration (unknown channel, missing file, bad key).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input violates an operation's precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed data file. The message names the offending line.
class ParseError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

/// Feature selection kept no bins.
class SelectionError : public Error {
public:
    using Error::Error;
};

/// Derives an independent stream seed from a base seed and a stream tag
/// (splitmix64 finalizer).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// FNV-1a, for turning string ids into seed tags.
constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace sigclass

#endif // SIGCLASS_COMMON_HPP
