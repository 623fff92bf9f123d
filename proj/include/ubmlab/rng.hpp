#pragma once

#include <cstdint>
#include <random>

namespace ubmlab {

// splitmix64; used to derive independent per-trial streams from
// (master seed, trial index) so ensembles are order-independent under
// parallel execution.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 trial_stream(std::uint64_t master_seed, std::uint64_t trial,
                                    std::uint64_t stream_tag = 0) {
    std::uint64_t s = splitmix64(master_seed ^ splitmix64(trial + 0x51ULL));
    s = splitmix64(s ^ splitmix64(stream_tag + 0xa3ULL));
    return std::mt19937_64(s);
}

} // namespace ubmlab
