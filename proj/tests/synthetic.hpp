#pragma once
// Synthetic fixtures shared by the unit, CLI and acceptance suites: a
// linearly separable image set (bright top half vs bright bottom half plus
// noise) and a hand-built network that classifies it exactly without
// training.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "electorate/cnn.hpp"
#include "electorate/gender.hpp"
#include "electorate/image.hpp"
#include "electorate/rng.hpp"

namespace synthetic {

using electorate::Gender;

struct FaceSet {
    std::vector<electorate::img::FaceTensor> tensors;
    std::vector<Gender> labels;
};

// Male examples are bright in the top half, female in the bottom half, with
// uniform +/-0.1 pixel noise. Classes alternate so any prefix is balanced.
inline FaceSet make_separable_set(std::size_t n, std::uint64_t seed,
                                  std::uint64_t first_user_id = 1) {
    FaceSet set;
    set.tensors.resize(n);
    set.labels.resize(n);
    std::mt19937_64 gen(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const Gender g = (i % 2 == 0) ? Gender::male : Gender::female;
        set.labels[i] = g;
        auto& t = set.tensors[i];
        t.user_id = first_user_id + i;
        for (int y = 0; y < 28; ++y) {
            const bool bright = (g == Gender::male) == (y < 14);
            for (int x = 0; x < 28; ++x) {
                for (int c = 0; c < 3; ++c) {
                    const double base = bright ? 0.8 : 0.2;
                    const double noise = 0.2 * electorate::uniform01(gen) - 0.1;
                    double v = base + noise;
                    if (v < 0.0) v = 0.0;
                    if (v > 1.0) v = 1.0;
                    t.data[(y * 28 + x) * 3 + c] = v;
                }
            }
        }
    }
    return set;
}

// One bright-top/bottom tensor for a specific user.
inline electorate::img::FaceTensor make_face(std::uint64_t user_id, Gender g, std::uint64_t seed) {
    FaceSet one = make_separable_set(1, electorate::derive_seed(seed, user_id), user_id);
    if (g == Gender::female) {  // make_separable_set puts male first; flip rows
        auto flipped = one.tensors[0];
        for (int y = 0; y < 28; ++y)
            for (int x = 0; x < 28 * 3; ++x)
                flipped.data[y * 28 * 3 + x] = one.tensors[0].data[(27 - y) * 28 * 3 + x];
        flipped.user_id = user_id;
        return flipped;
    }
    return one.tensors[0];
}

// Identity taps through both conv layers, then an FC layer that sums the top
// rows for the male logit and the bottom rows for the female logit. Classifies
// the separable set exactly, with no training step involved.
inline electorate::cnn::NetworkParams make_halves_classifier() {
    using namespace electorate::cnn;
    NetworkParams p = zero_params(NetworkShape{2, 2});
    // conv1 channel 0: pass the red channel through (center tap).
    p.conv1_w[((0 * kInputChannels + 0) * kKernel + kPad) * kKernel + kPad] = 1.0;
    // conv2 channel 0: pass conv1 channel 0 through.
    p.conv2_w[((0 * 2 + 0) * kKernel + kPad) * kKernel + kPad] = 1.0;
    const int side = kPooled2Side;  // 7x7 map in fc input channel 0
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const int flat = (0 * side + y) * side + x;
            if (y < side / 2) p.fc_w[0 * 2 * side * side + flat] = 1.0;   // male: top rows
            if (y > side / 2) p.fc_w[1 * 2 * side * side + flat] = 1.0;   // female: bottom rows
        }
    return p;
}

}  // namespace synthetic
