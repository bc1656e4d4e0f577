#pragma once
// Turns raw profile images plus externally supplied face boxes into
// normalized 28x28x3 tensors. Face detection itself happens upstream; this
// stage only filters, crops and resizes.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace electorate::img {

constexpr int kTensorSide = 28;
constexpr int kTensorChannels = 3;
constexpr int kTensorValues = kTensorSide * kTensorSide * kTensorChannels;

// Minimum original-file size for an acceptable image, 18 * 1024 bytes.
constexpr std::uint64_t kDefaultMinBytes = 18'432;

struct FaceBox {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
    std::int64_t area() const { return std::int64_t(w) * std::int64_t(h); }
};

struct RawProfileImage {
    std::uint64_t user_id = 0;
    std::uint64_t byte_size = 0;  // size of the original encoded file
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // height*width*3, row-major RGB
    std::vector<FaceBox> faces;        // from the external detector, may be empty
};

// Values in [0,1], layout (row, column, channel).
struct FaceTensor {
    std::uint64_t user_id = 0;
    std::array<double, kTensorValues> data{};
};

enum class RejectReason { no_face, too_small };

struct Rejection {
    std::uint64_t user_id = 0;
    RejectReason reason = RejectReason::no_face;
};

// Crop aspect ratio beyond 2:1 gets resized anyway but flagged, since the
// unpadded resize distorts it.
struct AspectWarning {
    std::uint64_t user_id = 0;
    double aspect_ratio = 0.0;
};

struct PreprocessResult {
    std::variant<FaceTensor, Rejection> outcome;
    std::optional<AspectWarning> warning;
};

const char* to_string(RejectReason r) noexcept;

// Rejects when no usable face box exists or the original file is smaller
// than min_bytes; otherwise crops the largest-area box (ties to the first
// listed, out-of-bounds boxes clamped), bilinearly resizes to 28x28 with
// pixel-center alignment, and scales to [0,1].
// Throws std::invalid_argument on a malformed pixel buffer.
PreprocessResult preprocess(const RawProfileImage& image,
                            std::uint64_t min_bytes = kDefaultMinBytes);

struct BatchResult {
    std::vector<FaceTensor> tensors;       // accepted images, input order
    std::vector<Rejection> rejections;     // one entry per non-emitted image
    std::vector<AspectWarning> warnings;   // advisory only
};

// Order-preserving; |tensors| + |rejections| == |images|.
BatchResult batch_preprocess(std::span<const RawProfileImage> images,
                             std::uint64_t min_bytes = kDefaultMinBytes);

// Tensor file: u32 count header, then count tensors as little-endian 32-bit
// floats in (row, column, channel) order.
void write_tensor_file(std::span<const FaceTensor> tensors, const std::filesystem::path& path);
std::vector<FaceTensor> read_tensor_file(const std::filesystem::path& path);

// Sidecar binding tensors to users: one decimal user id per line, same order
// as the tensor file.
void write_id_file(std::span<const FaceTensor> tensors, const std::filesystem::path& path);
std::vector<std::uint64_t> read_id_file(const std::filesystem::path& path);

// Binary PPM (P6, maxval 255) loader for fixture images.
struct PpmImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};
PpmImage load_ppm(const std::filesystem::path& path);
void save_ppm(const PpmImage& image, const std::filesystem::path& path);

}  // namespace electorate::img
