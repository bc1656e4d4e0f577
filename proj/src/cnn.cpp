#include "electorate/cnn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "electorate/parallel.hpp"
#include "electorate/rng.hpp"

namespace electorate::cnn {
namespace {

// Within-batch gradient reduction granularity. Fixed so the summed gradient
// is identical no matter how many workers run.
constexpr std::size_t kChunk = 16;

void check_shape(const NetworkShape& s) {
    if (s.c1 < 1 || s.c2 < 1) throw std::invalid_argument("cnn: channel widths must be >= 1");
}

std::size_t conv1_w_size(const NetworkShape& s) {
    return static_cast<std::size_t>(s.c1) * kInputChannels * kKernel * kKernel;
}
std::size_t conv2_w_size(const NetworkShape& s) {
    return static_cast<std::size_t>(s.c2) * s.c1 * kKernel * kKernel;
}
std::size_t fc_in(const NetworkShape& s) {
    return static_cast<std::size_t>(s.c2) * kPooled2Side * kPooled2Side;
}

}  // namespace

namespace detail {

// out[oc][y][x] = b[oc] + sum_{ic,ky,kx} in[ic][y+ky-2][x+kx-2] * w, zero
// padded. The (ic,ky,kx) accumulation order per output element matches the
// naive six-loop definition, and the inner x loop is contiguous.
void conv_forward(const double* in, int cin, const double* w, const double* b, int cout, int side,
                  double* out) {
    const int plane = side * side;
    for (int oc = 0; oc < cout; ++oc)
        std::fill(out + oc * plane, out + (oc + 1) * plane, b[oc]);

    for (int oc = 0; oc < cout; ++oc) {
        for (int ic = 0; ic < cin; ++ic) {
            const double* wk = w + ((oc * cin + ic) * kKernel) * kKernel;
            for (int ky = 0; ky < kKernel; ++ky) {
                const int dy = ky - kPad;
                const int y0 = std::max(0, -dy), y1 = std::min(side, side - dy);
                for (int kx = 0; kx < kKernel; ++kx) {
                    const double wv = wk[ky * kKernel + kx];
                    const int dx = kx - kPad;
                    const int x0 = std::max(0, -dx), x1 = std::min(side, side - dx);
                    for (int y = y0; y < y1; ++y) {
                        const double* irow = in + (ic * side + y + dy) * side + dx;
                        double* orow = out + (oc * side + y) * side;
                        for (int x = x0; x < x1; ++x) orow[x] += wv * irow[x];
                    }
                }
            }
        }
    }
}

// 2x2 stride-2 max pool; ties resolve to the first element in scan order.
void pool_forward(const double* in, int channels, int side, double* out, int* argmax) {
    const int half = side / 2;
    for (int c = 0; c < channels; ++c) {
        for (int py = 0; py < half; ++py) {
            for (int px = 0; px < half; ++px) {
                const int base = (c * side + 2 * py) * side + 2 * px;
                int best = base;
                double bv = in[base];
                const int cand[3] = {base + 1, base + side, base + side + 1};
                for (int k = 0; k < 3; ++k)
                    if (in[cand[k]] > bv) {
                        bv = in[cand[k]];
                        best = cand[k];
                    }
                const int o = (c * half + py) * half + px;
                out[o] = bv;
                argmax[o] = best;
            }
        }
    }
}

}  // namespace detail

namespace {

using detail::conv_forward;
using detail::pool_forward;

// dw[oc][ic][ky][kx] += sum_{y,x} gout[oc][y][x] * in[...]; db[oc] += sum gout.
void conv_backward_params(const double* in, int cin, const double* gout, int cout, int side,
                          double* dw, double* db) {
    const int plane = side * side;
    for (int oc = 0; oc < cout; ++oc) {
        double bsum = 0.0;
        const double* gplane = gout + oc * plane;
        for (int i = 0; i < plane; ++i) bsum += gplane[i];
        db[oc] += bsum;

        for (int ic = 0; ic < cin; ++ic) {
            double* dwk = dw + ((oc * cin + ic) * kKernel) * kKernel;
            for (int ky = 0; ky < kKernel; ++ky) {
                const int dy = ky - kPad;
                const int y0 = std::max(0, -dy), y1 = std::min(side, side - dy);
                for (int kx = 0; kx < kKernel; ++kx) {
                    const int dx = kx - kPad;
                    const int x0 = std::max(0, -dx), x1 = std::min(side, side - dx);
                    double acc = 0.0;
                    for (int y = y0; y < y1; ++y) {
                        const double* irow = in + (ic * side + y + dy) * side + dx;
                        const double* grow = gout + (oc * side + y) * side;
                        for (int x = x0; x < x1; ++x) acc += grow[x] * irow[x];
                    }
                    dwk[ky * kKernel + kx] += acc;
                }
            }
        }
    }
}

// din[ic][y+ky-2][x+kx-2] += w * gout[oc][y][x]. din must be zeroed first.
void conv_backward_input(const double* w, int cin, const double* gout, int cout, int side,
                         double* din) {
    for (int oc = 0; oc < cout; ++oc) {
        for (int ic = 0; ic < cin; ++ic) {
            const double* wk = w + ((oc * cin + ic) * kKernel) * kKernel;
            for (int ky = 0; ky < kKernel; ++ky) {
                const int dy = ky - kPad;
                const int y0 = std::max(0, -dy), y1 = std::min(side, side - dy);
                for (int kx = 0; kx < kKernel; ++kx) {
                    const double wv = wk[ky * kKernel + kx];
                    const int dx = kx - kPad;
                    const int x0 = std::max(0, -dx), x1 = std::min(side, side - dx);
                    for (int y = y0; y < y1; ++y) {
                        double* drow = din + (ic * side + y + dy) * side + dx;
                        const double* grow = gout + (oc * side + y) * side;
                        for (int x = x0; x < x1; ++x) drow[x] += wv * grow[x];
                    }
                }
            }
        }
    }
}

void relu(const double* in, double* out, int n) {
    for (int i = 0; i < n; ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

void pool_backward(const double* gout, const int* argmax, int n_out, double* gin) {
    for (int i = 0; i < n_out; ++i) gin[argmax[i]] += gout[i];
}

struct Scratch {
    std::vector<double> input;          // 3 x 28 x 28, CHW
    std::vector<double> pre1, act1;     // c1 x 28 x 28
    std::vector<double> pool1;          // c1 x 14 x 14
    std::vector<int> idx1;
    std::vector<double> pre2, act2;     // c2 x 14 x 14
    std::vector<double> pool2;          // c2 x 7 x 7
    std::vector<int> idx2;
    std::vector<double> dact1, dpool1, dact2, dpool2;

    explicit Scratch(const NetworkShape& s) {
        const int n1 = s.c1 * kInputSide * kInputSide;
        const int p1 = s.c1 * kPooled1Side * kPooled1Side;
        const int n2 = s.c2 * kPooled1Side * kPooled1Side;
        const int p2 = s.c2 * kPooled2Side * kPooled2Side;
        input.resize(kInputChannels * kInputSide * kInputSide);
        pre1.resize(n1);
        act1.resize(n1);
        pool1.resize(p1);
        idx1.resize(p1);
        pre2.resize(n2);
        act2.resize(n2);
        pool2.resize(p2);
        idx2.resize(p2);
        dact1.resize(n1);
        dpool1.resize(p1);
        dact2.resize(n2);
        dpool2.resize(p2);
    }
};

// Tensor layout is (row, col, channel); conv wants channel planes.
void load_input(const img::FaceTensor& t, std::vector<double>& input) {
    for (int c = 0; c < kInputChannels; ++c)
        for (int y = 0; y < kInputSide; ++y)
            for (int x = 0; x < kInputSide; ++x)
                input[(c * kInputSide + y) * kInputSide + x] =
                    t.data[(y * kInputSide + x) * kInputChannels + c];
}

std::array<double, kClasses> run_forward(const NetworkParams& p, const img::FaceTensor& t,
                                         Scratch& s) {
    load_input(t, s.input);
    conv_forward(s.input.data(), kInputChannels, p.conv1_w.data(), p.conv1_b.data(), p.shape.c1,
                 kInputSide, s.pre1.data());
    relu(s.pre1.data(), s.act1.data(), static_cast<int>(s.pre1.size()));
    pool_forward(s.act1.data(), p.shape.c1, kInputSide, s.pool1.data(), s.idx1.data());

    conv_forward(s.pool1.data(), p.shape.c1, p.conv2_w.data(), p.conv2_b.data(), p.shape.c2,
                 kPooled1Side, s.pre2.data());
    relu(s.pre2.data(), s.act2.data(), static_cast<int>(s.pre2.size()));
    pool_forward(s.act2.data(), p.shape.c2, kPooled1Side, s.pool2.data(), s.idx2.data());

    const std::size_t n_in = fc_in(p.shape);
    std::array<double, kClasses> logits{};
    for (int k = 0; k < kClasses; ++k) {
        double acc = p.fc_b[k];
        const double* w = p.fc_w.data() + k * n_in;
        for (std::size_t j = 0; j < n_in; ++j) acc += w[j] * s.pool2[j];
        logits[k] = acc;
    }

    const double m = std::max(logits[0], logits[1]);
    std::array<double, kClasses> probs{};
    double sum = 0.0;
    for (int k = 0; k < kClasses; ++k) {
        probs[k] = std::exp(logits[k] - m);
        sum += probs[k];
    }
    for (int k = 0; k < kClasses; ++k) probs[k] /= sum;
    return probs;
}

// Accumulates the (unscaled) cross-entropy and gradients for one example.
void run_backward(const NetworkParams& p, Gender y, const std::array<double, kClasses>& probs,
                  Scratch& s, Gradients& g, double& loss_sum) {
    const int target = static_cast<int>(y);
    loss_sum += -std::log(probs[target]);

    std::array<double, kClasses> dlogits = probs;
    dlogits[target] -= 1.0;

    const std::size_t n_in = fc_in(p.shape);
    std::fill(s.dpool2.begin(), s.dpool2.end(), 0.0);
    for (int k = 0; k < kClasses; ++k) {
        double* dw = g.fc_w.data() + k * n_in;
        const double* w = p.fc_w.data() + k * n_in;
        const double d = dlogits[k];
        for (std::size_t j = 0; j < n_in; ++j) {
            dw[j] += d * s.pool2[j];
            s.dpool2[j] += d * w[j];
        }
        g.fc_b[k] += d;
    }

    std::fill(s.dact2.begin(), s.dact2.end(), 0.0);
    pool_backward(s.dpool2.data(), s.idx2.data(), static_cast<int>(s.dpool2.size()),
                  s.dact2.data());
    for (std::size_t i = 0; i < s.dact2.size(); ++i)
        if (!(s.pre2[i] > 0.0)) s.dact2[i] = 0.0;

    conv_backward_params(s.pool1.data(), p.shape.c1, s.dact2.data(), p.shape.c2, kPooled1Side,
                         g.conv2_w.data(), g.conv2_b.data());
    std::fill(s.dpool1.begin(), s.dpool1.end(), 0.0);
    conv_backward_input(p.conv2_w.data(), p.shape.c1, s.dact2.data(), p.shape.c2, kPooled1Side,
                        s.dpool1.data());

    std::fill(s.dact1.begin(), s.dact1.end(), 0.0);
    pool_backward(s.dpool1.data(), s.idx1.data(), static_cast<int>(s.dpool1.size()),
                  s.dact1.data());
    for (std::size_t i = 0; i < s.dact1.size(); ++i)
        if (!(s.pre1[i] > 0.0)) s.dact1[i] = 0.0;

    conv_backward_params(s.input.data(), kInputChannels, s.dact1.data(), p.shape.c1, kInputSide,
                         g.conv1_w.data(), g.conv1_b.data());
    // No input gradient: the image is the first layer.
}

void add_scaled(std::vector<double>& dst, const std::vector<double>& src, double scale) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
}

void accumulate(Gradients& dst, const Gradients& src) {
    add_scaled(dst.conv1_w, src.conv1_w, 1.0);
    add_scaled(dst.conv1_b, src.conv1_b, 1.0);
    add_scaled(dst.conv2_w, src.conv2_w, 1.0);
    add_scaled(dst.conv2_b, src.conv2_b, 1.0);
    add_scaled(dst.fc_w, src.fc_w, 1.0);
    add_scaled(dst.fc_b, src.fc_b, 1.0);
}

void scale_params(NetworkParams& p, double s) {
    for (double* v : param_view(p)) *v *= s;
}

// Unscaled sums over batch[index_begin, index_end).
struct ChunkAccum {
    double loss_sum = 0.0;
    Gradients grads;
};

std::pair<double, Gradients> batch_gradients(const NetworkParams& params,
                                             std::span<const img::FaceTensor> batch,
                                             std::span<const Gender> labels,
                                             std::span<const std::size_t> order, int jobs) {
    const std::size_t n = order.size();
    const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<ChunkAccum> acc(n_chunks);
    for (auto& a : acc) a.grads = zero_params(params.shape);

    parallel_for_chunks(n_chunks, jobs, [&](std::size_t c) {
        Scratch scratch(params.shape);
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(n, lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i) {
            const std::size_t idx = order[i];
            const auto probs = run_forward(params, batch[idx], scratch);
            run_backward(params, labels[idx], probs, scratch, acc[c].grads, acc[c].loss_sum);
        }
    });

    double loss_sum = 0.0;
    Gradients total = std::move(acc[0].grads);
    loss_sum += acc[0].loss_sum;
    for (std::size_t c = 1; c < n_chunks; ++c) {
        accumulate(total, acc[c].grads);
        loss_sum += acc[c].loss_sum;
    }
    return {loss_sum, std::move(total)};
}

template <typename T>
void write_le(std::ofstream& out, T v) {
    unsigned char b[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in, const char* what) {
    unsigned char b[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(b), sizeof(T)))
        throw std::runtime_error(std::string("model load: truncated ") + what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
    return v;
}

constexpr char kModelMagic[5] = {'E', 'L', 'C', 'N', 'N'};
constexpr std::uint16_t kModelVersion = 1;

}  // namespace

std::size_t param_count(const NetworkShape& shape) noexcept {
    return conv1_w_size(shape) + shape.c1 + conv2_w_size(shape) + shape.c2 +
           kClasses * fc_in(shape) + kClasses;
}

NetworkParams zero_params(const NetworkShape& shape) {
    check_shape(shape);
    NetworkParams p;
    p.shape = shape;
    p.conv1_w.assign(conv1_w_size(shape), 0.0);
    p.conv1_b.assign(shape.c1, 0.0);
    p.conv2_w.assign(conv2_w_size(shape), 0.0);
    p.conv2_b.assign(shape.c2, 0.0);
    p.fc_w.assign(kClasses * fc_in(shape), 0.0);
    p.fc_b.assign(kClasses, 0.0);
    return p;
}

NetworkParams init_params(const NetworkShape& shape, std::uint64_t seed) {
    NetworkParams p = zero_params(shape);
    std::mt19937_64 gen(seed);
    auto fill_uniform = [&gen](std::vector<double>& v, double fan_in, double fan_out) {
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& x : v) x = (2.0 * uniform01(gen) - 1.0) * a;
    };
    const double k2 = kKernel * kKernel;
    fill_uniform(p.conv1_w, kInputChannels * k2, shape.c1 * k2);
    fill_uniform(p.conv2_w, shape.c1 * k2, shape.c2 * k2);
    fill_uniform(p.fc_w, static_cast<double>(fc_in(shape)), kClasses);
    return p;
}

std::vector<double*> param_view(NetworkParams& p) {
    std::vector<double*> view;
    view.reserve(param_count(p.shape));
    for (auto* vec : {&p.conv1_w, &p.conv1_b, &p.conv2_w, &p.conv2_b, &p.fc_w, &p.fc_b})
        for (double& x : *vec) view.push_back(&x);
    return view;
}

std::vector<const double*> param_view(const NetworkParams& p) {
    std::vector<const double*> view;
    view.reserve(param_count(p.shape));
    for (const auto* vec : {&p.conv1_w, &p.conv1_b, &p.conv2_w, &p.conv2_b, &p.fc_w, &p.fc_b})
        for (const double& x : *vec) view.push_back(&x);
    return view;
}

std::array<double, kClasses> forward_one(const NetworkParams& params, const img::FaceTensor& x) {
    Scratch scratch(params.shape);
    return run_forward(params, x, scratch);
}

std::vector<std::array<double, kClasses>> forward(const NetworkParams& params,
                                                  std::span<const img::FaceTensor> batch,
                                                  int jobs) {
    std::vector<std::array<double, kClasses>> out(batch.size());
    const std::size_t n_chunks = (batch.size() + kChunk - 1) / kChunk;
    parallel_for_chunks(n_chunks, jobs, [&](std::size_t c) {
        Scratch scratch(params.shape);
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(batch.size(), lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i) out[i] = run_forward(params, batch[i], scratch);
    });
    return out;
}

Gender predict(const NetworkParams& params, const img::FaceTensor& x) {
    const auto probs = forward_one(params, x);
    return probs[0] >= probs[1] ? Gender::male : Gender::female;
}

std::pair<double, Gradients> loss_and_gradients(const NetworkParams& params,
                                                std::span<const img::FaceTensor> batch,
                                                std::span<const Gender> labels) {
    if (batch.empty()) throw std::invalid_argument("loss_and_gradients: empty batch");
    if (batch.size() != labels.size())
        throw std::invalid_argument("loss_and_gradients: batch/label size mismatch");

    std::vector<std::size_t> order(batch.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto [loss_sum, grads] = batch_gradients(params, batch, labels, order, 1);

    const double inv = 1.0 / static_cast<double>(batch.size());
    scale_params(grads, inv);
    return {loss_sum * inv, std::move(grads)};
}

TrainResult train(std::span<const img::FaceTensor> data, std::span<const Gender> labels,
                  const NetworkShape& shape, const TrainConfig& config) {
    if (data.empty()) throw std::invalid_argument("train: empty data");
    if (data.size() != labels.size()) throw std::invalid_argument("train: data/label size mismatch");
    if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate))
        throw std::invalid_argument("train: learning_rate must be finite and >= 0");
    if (config.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (config.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");

    TrainResult result;
    result.params = init_params(shape, derive_seed(config.seed, 0));
    std::mt19937_64 shuffler(derive_seed(config.seed, 1));

    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto view = param_view(result.params);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        deterministic_shuffle(order, shuffler);
        double epoch_loss_sum = 0.0;

        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            std::span<const std::size_t> batch_order(order.data() + start, end - start);
            auto [loss_sum, grads] = batch_gradients(result.params, data, labels, batch_order,
                                                     config.jobs);
            if (!std::isfinite(loss_sum))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch + 1) + ", batch offset " +
                                         std::to_string(start));

            const double step = config.learning_rate / static_cast<double>(end - start);
            auto gview = param_view(grads);
            for (std::size_t i = 0; i < view.size(); ++i) *view[i] -= step * *gview[i];
            epoch_loss_sum += loss_sum;
        }
        result.epoch_losses.push_back(epoch_loss_sum / static_cast<double>(data.size()));
    }
    return result;
}

EvalMetrics metrics_from_confusion(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn,
                                   std::uint64_t tn) {
    EvalMetrics m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.tn = tn;
    const double total = static_cast<double>(tp + fp + fn + tn);
    m.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    m.accuracy = total > 0.0 ? static_cast<double>(tp + tn) / total : 0.0;
    return m;
}

EvalMetrics evaluate(const NetworkParams& params, std::span<const img::FaceTensor> data,
                     std::span<const Gender> labels, Gender positive, int jobs) {
    if (data.empty()) throw std::invalid_argument("evaluate: empty validation set");
    if (data.size() != labels.size())
        throw std::invalid_argument("evaluate: data/label size mismatch");

    const auto probs = forward(params, data, jobs);
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Gender pred = probs[i][0] >= probs[i][1] ? Gender::male : Gender::female;
        const bool pred_pos = pred == positive;
        const bool is_pos = labels[i] == positive;
        if (pred_pos && is_pos) ++tp;
        else if (pred_pos && !is_pos) ++fp;
        else if (!pred_pos && is_pos) ++fn;
        else ++tn;
    }
    return metrics_from_confusion(tp, fp, fn, tn);
}

void save_model(const NetworkParams& params, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("model save: cannot open " + path.string());
    out.write(kModelMagic, sizeof(kModelMagic));
    write_le<std::uint16_t>(out, kModelVersion);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.c1));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.c2));
    write_le<std::uint32_t>(out, kKernel);
    write_le<std::uint32_t>(out, kInputSide);
    write_le<std::uint32_t>(out, kInputChannels);
    write_le<std::uint32_t>(out, kClasses);
    for (const double* v : param_view(params))
        write_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(*v));
    if (!out) throw std::runtime_error("model save: write failed for " + path.string());
}

NetworkParams load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("model load: cannot open " + path.string());
    char magic[sizeof(kModelMagic)];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0)
        throw std::runtime_error("model load: bad magic in " + path.string());
    const auto version = read_le<std::uint16_t>(in, "version");
    if (version != kModelVersion)
        throw std::runtime_error("model load: unsupported version " + std::to_string(version));

    NetworkShape shape;
    shape.c1 = static_cast<int>(read_le<std::uint32_t>(in, "c1"));
    shape.c2 = static_cast<int>(read_le<std::uint32_t>(in, "c2"));
    const auto kernel = read_le<std::uint32_t>(in, "kernel");
    const auto side = read_le<std::uint32_t>(in, "input side");
    const auto channels = read_le<std::uint32_t>(in, "input channels");
    const auto classes = read_le<std::uint32_t>(in, "classes");
    if (kernel != kKernel || side != kInputSide || channels != kInputChannels ||
        classes != kClasses)
        throw std::runtime_error("model load: architecture constants mismatch in " + path.string());

    NetworkParams p = zero_params(shape);
    for (double* v : param_view(p)) {
        *v = std::bit_cast<double>(read_le<std::uint64_t>(in, "parameters"));
        if (!std::isfinite(*v))
            throw std::runtime_error("model load: non-finite parameter in " + path.string());
    }
    return p;
}

}  // namespace electorate::cnn
