#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace pairaudit {

// Exit code 1 from the CLI: bad flags, malformed config, inconsistent options.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exit code 2 from the CLI: the inputs themselves are broken (unparseable rows,
// unmapped labels, misaligned files).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Split : int { train = 0, validation = 1, test = 2 };

const char* split_name(Split s);

// splitmix64; used to derive independent sub-seeds from a master seed.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) { return mix64(mix64(a) ^ b); }
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix64(a, b) ^ c);
}

// Thin wrapper so every draw goes through one deterministic code path.
// mt19937_64 output is pinned by the standard, and the helpers below avoid
// std::uniform_*_distribution whose sequences vary across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1)
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // [0, n)
    std::uint64_t next_index(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

    bool next_bernoulli(double p) { return next_double() < p; }

    // standard normal via Box-Muller, consuming exactly two draws per call
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    std::mt19937_64 engine_;
};

// Runs fn(i) for i in [0, n). Work is split into fixed chunks so results land in
// caller-preallocated slots; fn must not touch shared mutable state.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

std::vector<std::string> split_string(std::string_view text, char sep);
std::string join_strings(const std::vector<std::string>& parts, const std::string& sep);

// Shortest round-trip decimal rendering; used everywhere a double reaches a file.
std::string format_double(double v);

std::string read_text_file(const std::string& path);

// Output helpers create missing parent directories.
std::ofstream open_output_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace pairaudit
