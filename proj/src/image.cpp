#include "electorate/image.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace electorate::img {
namespace {

struct Crop {
    int x0, y0, w, h;
};

// Clamp a detector box to the image; empty intersections are unusable.
std::optional<Crop> clamp_box(const FaceBox& box, int width, int height) {
    const int x0 = std::max(box.x, 0);
    const int y0 = std::max(box.y, 0);
    const int x1 = std::min(box.x + box.w, width);
    const int y1 = std::min(box.y + box.h, height);
    if (x1 <= x0 || y1 <= y0) return std::nullopt;
    return Crop{x0, y0, x1 - x0, y1 - y0};
}

inline double lerp(double a, double b, double t) { return a + t * (b - a); }

// Bilinear resize of the crop to 28x28, pixel-center aligned: output pixel i
// samples at (i+0.5)*scale - 0.5, clamped. The lerp form keeps constant
// images exactly constant and preserves monotonicity along each axis.
void resize_crop(const RawProfileImage& image, const Crop& crop, FaceTensor& out) {
    const double sx = static_cast<double>(crop.w) / kTensorSide;
    const double sy = static_cast<double>(crop.h) / kTensorSide;
    const std::uint8_t* px = image.pixels.data();
    const std::size_t stride = static_cast<std::size_t>(image.width) * 3;

    for (int oy = 0; oy < kTensorSide; ++oy) {
        double fy = (oy + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(crop.h - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, crop.h - 1);
        const double ty = fy - y0;
        const std::uint8_t* row0 = px + (crop.y0 + y0) * stride + crop.x0 * 3;
        const std::uint8_t* row1 = px + (crop.y0 + y1) * stride + crop.x0 * 3;

        for (int ox = 0; ox < kTensorSide; ++ox) {
            double fx = (ox + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(crop.w - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, crop.w - 1);
            const double tx = fx - x0;
            for (int c = 0; c < kTensorChannels; ++c) {
                const double top = lerp(row0[x0 * 3 + c], row0[x1 * 3 + c], tx);
                const double bot = lerp(row1[x0 * 3 + c], row1[x1 * 3 + c], tx);
                out.data[(oy * kTensorSide + ox) * kTensorChannels + c] =
                    lerp(top, bot, ty) / 255.0;
            }
        }
    }
}

template <typename T>
T read_le(std::ifstream& in, const char* what) {
    unsigned char b[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(b), sizeof(T)))
        throw std::runtime_error(std::string("tensor file: truncated ") + what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
    return v;
}

}  // namespace

const char* to_string(RejectReason r) noexcept {
    switch (r) {
        case RejectReason::no_face: return "no_face";
        case RejectReason::too_small: return "too_small";
    }
    return "unknown";
}

PreprocessResult preprocess(const RawProfileImage& image, std::uint64_t min_bytes) {
    if (image.width < 1 || image.height < 1 ||
        image.pixels.size() !=
            static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height) * 3)
        throw std::invalid_argument("preprocess: malformed pixel buffer for user " +
                                    std::to_string(image.user_id));

    PreprocessResult result;
    if (image.faces.empty()) {
        result.outcome = Rejection{image.user_id, RejectReason::no_face};
        return result;
    }
    if (image.byte_size < min_bytes) {
        result.outcome = Rejection{image.user_id, RejectReason::too_small};
        return result;
    }

    // Largest area wins; ties go to the first listed box.
    const FaceBox* best = nullptr;
    std::optional<Crop> best_crop;
    for (const FaceBox& box : image.faces) {
        const auto crop = clamp_box(box, image.width, image.height);
        if (!crop) continue;
        if (!best || box.area() > best->area()) {
            best = &box;
            best_crop = crop;
        }
    }
    if (!best_crop) {
        result.outcome = Rejection{image.user_id, RejectReason::no_face};
        return result;
    }

    FaceTensor tensor;
    tensor.user_id = image.user_id;
    resize_crop(image, *best_crop, tensor);
    result.outcome = std::move(tensor);

    const double aspect = static_cast<double>(std::max(best_crop->w, best_crop->h)) /
                          static_cast<double>(std::min(best_crop->w, best_crop->h));
    if (aspect > 2.0) result.warning = AspectWarning{image.user_id, aspect};
    return result;
}

BatchResult batch_preprocess(std::span<const RawProfileImage> images, std::uint64_t min_bytes) {
    BatchResult out;
    for (const RawProfileImage& image : images) {
        PreprocessResult r = preprocess(image, min_bytes);
        if (r.warning) out.warnings.push_back(*r.warning);
        if (auto* tensor = std::get_if<FaceTensor>(&r.outcome))
            out.tensors.push_back(std::move(*tensor));
        else
            out.rejections.push_back(std::get<Rejection>(r.outcome));
    }
    return out;
}

void write_tensor_file(std::span<const FaceTensor> tensors, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("tensor file: cannot open " + path.string());
    const std::uint32_t count = static_cast<std::uint32_t>(tensors.size());
    unsigned char header[4];
    for (int i = 0; i < 4; ++i) header[i] = static_cast<unsigned char>((count >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(header), 4);

    std::vector<float> buf(kTensorValues);
    for (const FaceTensor& t : tensors) {
        for (int i = 0; i < kTensorValues; ++i) buf[i] = static_cast<float>(t.data[i]);
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
    if (!out) throw std::runtime_error("tensor file: write failed for " + path.string());
}

std::vector<FaceTensor> read_tensor_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("tensor file: cannot open " + path.string());
    const auto count = read_le<std::uint32_t>(in, "count header");

    static_assert(sizeof(float) == 4);
    std::vector<FaceTensor> tensors(count);
    std::vector<float> buf(kTensorValues);
    for (std::uint32_t k = 0; k < count; ++k) {
        if (!in.read(reinterpret_cast<char*>(buf.data()),
                     static_cast<std::streamsize>(buf.size() * sizeof(float))))
            throw std::runtime_error("tensor file: truncated tensor " + std::to_string(k));
        for (int i = 0; i < kTensorValues; ++i) tensors[k].data[i] = buf[i];
    }
    return tensors;
}

void write_id_file(std::span<const FaceTensor> tensors, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("id file: cannot open " + path.string());
    for (const FaceTensor& t : tensors) out << t.user_id << '\n';
    if (!out) throw std::runtime_error("id file: write failed for " + path.string());
}

std::vector<std::uint64_t> read_id_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("id file: cannot open " + path.string());
    std::vector<std::uint64_t> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::uint64_t id = 0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), id);
        if (ec != std::errc() || ptr != line.data() + line.size())
            throw std::runtime_error("id file: bad line '" + line + "' in " + path.string());
        ids.push_back(id);
    }
    return ids;
}

PpmImage load_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("ppm: cannot open " + path.string());

    auto next_token = [&in, &path]() {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {  // comment to end of line
                while ((c = in.get()) != EOF && c != '\n') {}
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return tok;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        if (tok.empty()) throw std::runtime_error("ppm: truncated header in " + path.string());
        return tok;
    };

    if (next_token() != "P6") throw std::runtime_error("ppm: not a P6 file: " + path.string());
    PpmImage image;
    image.width = std::stoi(next_token());
    image.height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (image.width < 1 || image.height < 1 || maxval != 255)
        throw std::runtime_error("ppm: unsupported dimensions/maxval in " + path.string());

    const std::size_t n = static_cast<std::size_t>(image.width) * image.height * 3;
    image.pixels.resize(n);
    if (!in.read(reinterpret_cast<char*>(image.pixels.data()), static_cast<std::streamsize>(n)))
        throw std::runtime_error("ppm: truncated pixel data in " + path.string());
    return image;
}

void save_ppm(const PpmImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("ppm: cannot open " + path.string());
    out << "P6\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out) throw std::runtime_error("ppm: write failed for " + path.string());
}

}  // namespace electorate::img
