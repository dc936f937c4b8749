#ifndef TOPK_RNG_HPP
#define TOPK_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace topk {

// Seeded PRNG stream with fully specified draw rules, so runs are
// reproducible independent of the standard library's distribution code.
//
//   uniform():  top 53 bits of one 64-bit draw, scaled to [0, 1)
//   below(n):   rejection sampling on the 64-bit draw, uniform in [0, n)
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    // Independent stream for (seed, stream_id), mixed through splitmix64.
    static Rng derive(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next() { return engine_(); }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::size_t below(std::size_t n);

    // Fisher-Yates, last position first.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace topk

#endif  // TOPK_RNG_HPP
