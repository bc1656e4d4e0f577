#pragma once
// From-scratch gender classifier: conv(5x5, pad 2) -> ReLU -> maxpool(2x2/2)
// -> conv -> ReLU -> maxpool -> fully connected -> softmax, all in 64-bit
// reals. Gradients are exact for that forward definition so they can be
// checked against central finite differences.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "electorate/gender.hpp"
#include "electorate/image.hpp"

namespace electorate::cnn {

constexpr int kKernel = 5;
constexpr int kPad = 2;
constexpr int kInputSide = img::kTensorSide;   // 28
constexpr int kInputChannels = img::kTensorChannels;
constexpr int kClasses = 2;

struct NetworkShape {
    int c1 = 8;   // conv1 output channels
    int c2 = 16;  // conv2 output channels
};

// After two pools: 28 -> 14 -> 7.
constexpr int kPooled1Side = kInputSide / 2;
constexpr int kPooled2Side = kInputSide / 4;

struct NetworkParams {
    NetworkShape shape;
    std::vector<double> conv1_w;  // c1 x 3 x 5 x 5
    std::vector<double> conv1_b;  // c1
    std::vector<double> conv2_w;  // c2 x c1 x 5 x 5
    std::vector<double> conv2_b;  // c2
    std::vector<double> fc_w;     // 2 x (c2 * 7 * 7)
    std::vector<double> fc_b;     // 2
};

using Gradients = NetworkParams;

std::size_t param_count(const NetworkShape& shape) noexcept;

NetworkParams zero_params(const NetworkShape& shape);

// Weights uniform in +/- sqrt(6 / (fan_in + fan_out)) from the seeded
// generator, biases zero. Draw order is fixed, so identical seeds give
// identical parameters on every platform.
NetworkParams init_params(const NetworkShape& shape, std::uint64_t seed);

// Flat view over all parameters in declaration order (conv1_w, conv1_b,
// conv2_w, conv2_b, fc_w, fc_b); used by the optimizer and the gradient
// check.
std::vector<double*> param_view(NetworkParams& p);
std::vector<const double*> param_view(const NetworkParams& p);

// Per-example class probabilities (male, female); each pair is nonnegative
// and sums to 1. `jobs` fans the batch out across threads; outputs land by
// index so the result does not depend on the worker count.
std::array<double, kClasses> forward_one(const NetworkParams& params, const img::FaceTensor& x);
std::vector<std::array<double, kClasses>> forward(const NetworkParams& params,
                                                  std::span<const img::FaceTensor> batch,
                                                  int jobs = 1);

Gender predict(const NetworkParams& params, const img::FaceTensor& x);

// Mean softmax cross-entropy over the batch and its exact gradients.
// Throws std::invalid_argument on an empty batch or size mismatch.
std::pair<double, Gradients> loss_and_gradients(const NetworkParams& params,
                                                std::span<const img::FaceTensor> batch,
                                                std::span<const Gender> labels);

struct TrainConfig {
    double learning_rate = 0.05;
    int batch_size = 64;
    int epochs = 10;
    std::uint64_t seed = 0;
    int jobs = 1;  // <= 0 picks the hardware thread count
};

struct TrainResult {
    NetworkParams params;
    std::vector<double> epoch_losses;  // mean training loss per epoch
};

// Plain SGD. Initialization, shuffling and batching are all seeded, and
// within-batch gradients are reduced over fixed-size chunks in chunk order,
// so the result is bit-identical for a fixed (data order, seed, config)
// regardless of `jobs`. Throws std::runtime_error when the loss goes
// non-finite. The trainer never rebalances classes.
TrainResult train(std::span<const img::FaceTensor> data, std::span<const Gender> labels,
                  const NetworkShape& shape, const TrainConfig& config);

struct EvalMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

EvalMetrics metrics_from_confusion(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn,
                                   std::uint64_t tn);

// Confusion metrics of argmax predictions; the positive class defaults to
// male and is configurable. Throws std::invalid_argument on an empty set.
EvalMetrics evaluate(const NetworkParams& params, std::span<const img::FaceTensor> data,
                     std::span<const Gender> labels, Gender positive = Gender::male,
                     int jobs = 1);

// Model file: magic "ELCNN", u16 version, architecture constants, then the
// parameters as little-endian 64-bit floats in declaration order.
// load(save(p)) == p bit-exactly.
void save_model(const NetworkParams& params, const std::filesystem::path& path);
NetworkParams load_model(const std::filesystem::path& path);

namespace detail {

// Layer kernels, exposed for the oracle tests. Layouts are channel-major
// planes (c, y, x); convolutions are 5x5 with zero padding 2, pools 2x2
// stride 2 with first-wins ties.
void conv_forward(const double* in, int cin, const double* w, const double* b, int cout, int side,
                  double* out);
void pool_forward(const double* in, int channels, int side, double* out, int* argmax);

}  // namespace detail

}  // namespace electorate::cnn
