#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace stiffbench {

/// Mixes a 64-bit value (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent seed for a named stream, so subsystems drawing
/// from the same session seed never share a sequence.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

/// Seeded generator with platform-independent output.
///
/// std::mt19937_64 is fully specified by the standard; the distributions
/// are not, so the conversions below are done by hand.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::string_view stream) : engine_(derive_seed(seed, stream)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via the Marsaglia polar method.
    double normal();

    bool coin() { return (engine_() >> 63) != 0; }

    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace stiffbench
