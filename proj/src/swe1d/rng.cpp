#include "swe1d/rng.hpp"

#include "swe1d/hot.hpp"

namespace swe {

void fill_standard_normal(Xoshiro256pp& rng, std::span<double> out) {
    constexpr std::size_t kChunk = 2048;
    double u1[kChunk], u2[kChunk];
    std::size_t done = 0;
    const std::size_t pairs = out.size() / 2;
    while (done < pairs) {
        const std::size_t take = std::min(kChunk, pairs - done);
        for (std::size_t i = 0; i < take; ++i) {
            u1[i] = rng.uniform_pos();
            u2[i] = rng.uniform();
        }
        hot::box_muller(u1, u2, out.data() + 2 * done, take);
        done += take;
    }
    if (out.size() % 2) {
        double a = rng.uniform_pos(), b = rng.uniform(), pair[2];
        hot::box_muller(&a, &b, pair, 1);
        out[out.size() - 1] = pair[0];
    }
}

}  // namespace swe
