#pragma once

#include <cstdint>

namespace electorate {

// Class indices are fixed across the labeler, the classifier and the stats
// layer: male = 0, female = 1.
enum class Gender : std::uint8_t { male = 0, female = 1 };

inline const char* to_string(Gender g) noexcept {
    return g == Gender::male ? "male" : "female";
}

}  // namespace electorate
