#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace ck {

inline constexpr const char* kToolVersion = "cinekit 0.1.0";

/// Input data is structurally valid but degenerate for the requested
/// operation (constant sequence fed to a normalizer, empty edge set, ...).
class DegenerateInputError : public std::runtime_error {
public:
    explicit DegenerateInputError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed on-disk container or manifest. Carries the byte offset and the
/// field being parsed when the problem was detected.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& field, std::uint64_t offset, const std::string& what)
        : std::runtime_error("parse error at byte " + std::to_string(offset) + " (" + field +
                             "): " + what),
          field_(field),
          offset_(offset) {}

    const std::string& field() const { return field_; }
    std::uint64_t offset() const { return offset_; }

private:
    std::string field_;
    std::uint64_t offset_;
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Missing or inconsistent run configuration (e.g. evaluating a learned
/// variant without a checkpoint).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline void check_arg(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

/// splitmix64 finalizer; used to derive independent seed values.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Deterministic random stream. Sub-streams are derived by hashing a seed
/// with a path of integers, so workers pulling per-example streams produce
/// the same values regardless of scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(mix64(seed)) {}

    static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
        std::uint64_t s = mix64(seed);
        for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x517cc1b727220a95ull));
        return Rng(s);
    }

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(eng_);
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }

    /// Uniform integer in [lo, hi], both inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng_);
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        return std::normal_distribution<double>(mean, stddev)(eng_);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace ck
