#pragma once

#include <array>
#include <cstdint>

namespace gpot {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// A stream is (key, counter-high) and the position within the stream is
// counter-low, so any path's sequence can be regenerated independently of
// every other path. This is what makes parallel Monte Carlo runs sample
// exactly the same paths as serial ones.
struct Philox4x32 {
    std::array<std::uint32_t, 4> counter{};
    std::array<std::uint32_t, 2> key{};

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> k);

    // Generate the block at the current counter and advance the position.
    std::array<std::uint32_t, 4> next();
};

// Per-path random stream derived from (master_seed, stream_id). Supplies the
// variates the samplers need; one instance must not be shared across threads.
class PathRng {
  public:
    PathRng(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();
    double uniform();     // [0, 1)
    double exponential(); // Exp(1)
    double normal();      // N(0, 1)
    double gamma(double shape); // Gamma(shape, 1), shape > 0

  private:
    Philox4x32 gen_;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4; // consumed
    double normal_spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace gpot
