#ifndef SDDE_RNG_HPP
#define SDDE_RNG_HPP

#include <array>
#include <cstdint>

namespace sdde {

// Philox4x32-10 counter-based block function (Salmon et al., Random123).
// Pure: output depends only on (counter, key), which is what makes per-path
// streams reproducible regardless of thread scheduling.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

std::uint64_t splitmix64(std::uint64_t x);

// One logical random stream, identified by (seed, stream, substream).
// Distinct identifiers give statistically independent sequences; equal
// identifiers give bit-identical sequences on every platform and thread.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream);

    std::uint64_t next_u64();
    // Uniform on [0, 1), 53-bit resolution.
    double next_uniform();
    // Standard normal via Box-Muller on stream uniforms (pair-cached).
    double next_gaussian();

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t salt_;    // stream identity folded into the counter block
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace sdde

#endif // SDDE_RNG_HPP
