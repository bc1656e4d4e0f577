#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "electorate/cnn.hpp"
#include "electorate/rng.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace electorate::cnn;
using electorate::Gender;
using electorate::img::FaceTensor;

namespace {

FaceTensor random_tensor(std::mt19937_64& gen, std::uint64_t user = 0) {
    FaceTensor t;
    t.user_id = user;
    for (auto& v : t.data) v = electorate::uniform01(gen);
    return t;
}

bool params_equal(const NetworkParams& a, const NetworkParams& b) {
    const auto va = param_view(a), vb = param_view(b);
    if (va.size() != vb.size()) return false;
    for (std::size_t i = 0; i < va.size(); ++i)
        if (*va[i] != *vb[i]) return false;
    return true;
}

}  // namespace

TEST_CASE("zero parameters give the uniform prediction and loss ln 2") {
    const NetworkParams p = zero_params(NetworkShape{8, 16});
    std::mt19937_64 gen(1);
    const FaceTensor x = random_tensor(gen);
    const auto probs = forward_one(p, x);
    CHECK(probs[0] == 0.5);
    CHECK(probs[1] == 0.5);

    const std::vector<FaceTensor> batch{x};
    const std::vector<Gender> labels{Gender::male};
    const auto [loss, grads] = loss_and_gradients(p, batch, labels);
    CHECK(std::fabs(loss - std::log(2.0)) < 1e-15);
}

TEST_CASE("softmax outputs are nonnegative and sum to 1 within 1e-12") {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 10; ++trial) {
        const NetworkParams p = init_params(NetworkShape{4, 8}, trial);
        const auto probs = forward_one(p, random_tensor(gen));
        CHECK(probs[0] >= 0.0);
        CHECK(probs[1] >= 0.0);
        CHECK(std::fabs(probs[0] + probs[1] - 1.0) <= 1e-12);
    }
}

TEST_CASE("forward is deterministic and independent of the worker count") {
    std::mt19937_64 gen(3);
    const NetworkParams p = init_params(NetworkShape{4, 8}, 77);
    std::vector<FaceTensor> batch;
    for (int i = 0; i < 40; ++i) batch.push_back(random_tensor(gen, i));

    const auto a = forward(p, batch, 1);
    const auto b = forward(p, batch, 1);
    const auto c = forward(p, batch, 3);
    REQUIRE(a.size() == batch.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i][0] == b[i][0]);
        CHECK(a[i][0] == c[i][0]);
        CHECK(a[i][1] == c[i][1]);
    }
}

TEST_CASE("convolution matches the direct six-loop oracle") {
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 8; ++trial) {
        const int cin = 1 + static_cast<int>(gen() % 3);
        const int cout = 1 + static_cast<int>(gen() % 3);
        const int side = 8 + 2 * static_cast<int>(gen() % 4);
        std::vector<double> in(cin * side * side), w(cout * cin * 25), b(cout);
        for (auto& v : in) v = electorate::uniform01(gen) - 0.5;
        for (auto& v : w) v = electorate::uniform01(gen) - 0.5;
        for (auto& v : b) v = electorate::uniform01(gen) - 0.5;

        std::vector<double> naive;
        oracles::conv_naive(in, cin, w, b, cout, side, naive);

        std::vector<double> fast(naive.size());
        detail::conv_forward(in.data(), cin, w.data(), b.data(), cout, side, fast.data());
        for (std::size_t i = 0; i < fast.size(); ++i)
            CHECK(fast[i] == doctest::Approx(naive[i]).epsilon(1e-13));
    }
}

TEST_CASE("max pool matches the brute-force window maxima") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 8; ++trial) {
        const int channels = 1 + static_cast<int>(gen() % 4);
        const int side = 8;
        std::vector<double> in(channels * side * side);
        for (auto& v : in) v = electorate::uniform01(gen);

        std::vector<double> naive;
        oracles::pool_naive(in, channels, side, naive);

        std::vector<double> fast(naive.size());
        std::vector<int> argmax(naive.size());
        detail::pool_forward(in.data(), channels, side, fast.data(), argmax.data());
        for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == naive[i]);
    }
}

TEST_CASE("gradients match central finite differences on the reduced network") {
    const NetworkShape shape{2, 2};
    NetworkParams p = init_params(shape, 2024);
    std::mt19937_64 gen(6);
    std::vector<FaceTensor> batch;
    std::vector<Gender> labels;
    for (int i = 0; i < 4; ++i) {
        batch.push_back(random_tensor(gen, i));
        labels.push_back(i % 2 == 0 ? Gender::male : Gender::female);
    }

    const auto [loss, grads] = loss_and_gradients(p, batch, labels);
    auto view = param_view(p);
    const auto gview = param_view(static_cast<const NetworkParams&>(grads));

    const double h = 1e-5;
    double max_rel = 0.0;
    for (std::size_t i = 0; i < view.size(); ++i) {
        const double saved = *view[i];
        *view[i] = saved + h;
        const double up = loss_and_gradients(p, batch, labels).first;
        *view[i] = saved - h;
        const double down = loss_and_gradients(p, batch, labels).first;
        *view[i] = saved;

        const double numeric = (up - down) / (2.0 * h);
        const double analytic = *gview[i];
        const double diff = std::fabs(numeric - analytic);
        if (diff <= 1e-7) continue;  // absolute agreement floor for near-zero slopes
        max_rel = std::max(max_rel, diff / std::max(std::fabs(numeric), std::fabs(analytic)));
    }
    CHECK(max_rel < 1e-4);
}

TEST_CASE("doubling the logit-layer weights is consistent with a recomputed forward pass") {
    const NetworkShape shape{2, 4};
    NetworkParams p = init_params(shape, 55);
    std::mt19937_64 gen(7);
    const std::vector<FaceTensor> batch{random_tensor(gen, 1), random_tensor(gen, 2)};
    const std::vector<Gender> labels{Gender::male, Gender::female};

    NetworkParams doubled = p;
    for (auto& w : doubled.fc_w) w *= 2.0;
    for (auto& b : doubled.fc_b) b *= 2.0;

    // Oracle: per-example recomputation from the probabilities of the
    // original network. Doubling all logits z -> 2z turns softmax(z) into
    // p^2 / (p^2 + q^2) after normalizing.
    double oracle_loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto probs = forward_one(p, batch[i]);
        const double a = probs[0] * probs[0], b = probs[1] * probs[1];
        const double target = labels[i] == Gender::male ? a / (a + b) : b / (a + b);
        oracle_loss += -std::log(target);
    }
    oracle_loss /= static_cast<double>(batch.size());

    const double doubled_loss = loss_and_gradients(doubled, batch, labels).first;
    CHECK(doubled_loss == doctest::Approx(oracle_loss).epsilon(1e-10));
    CHECK(doubled_loss != loss_and_gradients(p, batch, labels).first);
}

TEST_CASE("learning rate zero leaves the initial parameters untouched") {
    const auto set = synthetic::make_separable_set(32, 1);
    TrainConfig config;
    config.learning_rate = 0.0;
    config.epochs = 3;
    config.batch_size = 8;
    config.seed = 5;
    const auto result = train(set.tensors, set.labels, NetworkShape{2, 2}, config);
    const NetworkParams fresh = init_params(NetworkShape{2, 2}, electorate::derive_seed(5, 0));
    CHECK(params_equal(result.params, fresh));
}

TEST_CASE("training is bit-reproducible per seed and across worker counts") {
    const auto set = synthetic::make_separable_set(48, 2);
    TrainConfig config;
    config.epochs = 2;
    config.batch_size = 16;
    config.seed = 11;
    config.jobs = 1;
    const auto a = train(set.tensors, set.labels, NetworkShape{2, 2}, config);
    const auto b = train(set.tensors, set.labels, NetworkShape{2, 2}, config);
    config.jobs = 3;
    const auto c = train(set.tensors, set.labels, NetworkShape{2, 2}, config);
    CHECK(params_equal(a.params, b.params));
    CHECK(params_equal(a.params, c.params));
    CHECK(a.epoch_losses == b.epoch_losses);
    CHECK(a.epoch_losses == c.epoch_losses);

    config.seed = 12;
    const auto d = train(set.tensors, set.labels, NetworkShape{2, 2}, config);
    CHECK_FALSE(params_equal(a.params, d.params));
}

TEST_CASE("a quick run on the separable set learns it") {
    const auto train_set = synthetic::make_separable_set(400, 3);
    const auto test_set = synthetic::make_separable_set(100, 4, 10'000);
    TrainConfig config;
    config.epochs = 3;
    config.seed = 1;
    config.jobs = 0;
    const auto result = train(train_set.tensors, train_set.labels, NetworkShape{4, 8}, config);
    const auto metrics = evaluate(result.params, test_set.tensors, test_set.labels);
    CHECK(metrics.accuracy >= 0.95);
}

TEST_CASE("per-epoch loss is non-increasing after epoch 2 in at least 9 of 10 seeds") {
    const auto set = synthetic::make_separable_set(300, 20);
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        TrainConfig config;
        config.epochs = 6;
        config.seed = seed;
        config.jobs = 0;
        const auto result = train(set.tensors, set.labels, NetworkShape{2, 4}, config);
        bool monotone = true;
        for (std::size_t e = 2; e < result.epoch_losses.size(); ++e)
            if (result.epoch_losses[e] > result.epoch_losses[e - 1]) monotone = false;
        ok += monotone ? 1 : 0;
    }
    CHECK(ok >= 9);
}

TEST_CASE("metrics from confusion counts") {
    const auto m = metrics_from_confusion(9, 1, 1, 9);
    CHECK(m.precision == doctest::Approx(0.9));
    CHECK(m.recall == doctest::Approx(0.9));
    CHECK(m.f1 == doctest::Approx(0.9));
    CHECK(m.accuracy == doctest::Approx(0.9));

    const auto perfect = metrics_from_confusion(10, 0, 0, 10);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);
    CHECK(perfect.accuracy == 1.0);

    const auto empty_pos = metrics_from_confusion(0, 0, 0, 10);
    CHECK(empty_pos.precision == 0.0);
    CHECK(empty_pos.recall == 0.0);
    CHECK(empty_pos.f1 == 0.0);
    CHECK(empty_pos.accuracy == 1.0);
}

TEST_CASE("f1 is the harmonic mean of precision and recall") {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = metrics_from_confusion(gen() % 50, gen() % 50, gen() % 50, gen() % 50);
        if (m.precision + m.recall > 0.0)
            CHECK(m.f1 == doctest::Approx(2 * m.precision * m.recall / (m.precision + m.recall)));
    }
}

TEST_CASE("evaluate against a random predictor on balanced labels sits near 0.5") {
    std::mt19937_64 gen(9);
    std::vector<FaceTensor> data;
    std::vector<Gender> labels;
    for (int i = 0; i < 10'000; ++i) {
        data.push_back(random_tensor(gen, i));
        labels.push_back(i % 2 == 0 ? Gender::male : Gender::female);
    }
    const NetworkParams p = init_params(NetworkShape{2, 2}, 31337);
    const auto m = evaluate(p, data, labels, Gender::male, 0);
    CHECK(m.accuracy == doctest::Approx(0.5).epsilon(0.04));  // 4-sigma binomial band
}

TEST_CASE("evaluate with the female positive class swaps the confusion roles") {
    const auto set = synthetic::make_separable_set(40, 10);
    const NetworkParams p = synthetic::make_halves_classifier();
    const auto male_pos = evaluate(p, set.tensors, set.labels, Gender::male);
    const auto female_pos = evaluate(p, set.tensors, set.labels, Gender::female);
    CHECK(male_pos.tp == female_pos.tn);
    CHECK(male_pos.fp == female_pos.fn);
    CHECK(male_pos.accuracy == female_pos.accuracy);
}

TEST_CASE("model serialization roundtrips bit-exactly") {
    const fs::path dir = "cnn_test_tmp";
    fs::create_directories(dir);
    const NetworkParams p = init_params(NetworkShape{3, 5}, 99);
    save_model(p, dir / "m.elcnn");
    const NetworkParams back = load_model(dir / "m.elcnn");
    CHECK(back.shape.c1 == 3);
    CHECK(back.shape.c2 == 5);
    CHECK(params_equal(p, back));
}

TEST_CASE("model load rejects corrupt input") {
    const fs::path dir = "cnn_test_tmp";
    fs::create_directories(dir);
    std::ofstream(dir / "junk.elcnn", std::ios::binary) << "NOTAMODEL";
    CHECK_THROWS_AS(load_model(dir / "junk.elcnn"), std::runtime_error);
}

TEST_CASE("error paths") {
    const NetworkParams p = zero_params(NetworkShape{2, 2});
    const std::vector<FaceTensor> empty;
    const std::vector<Gender> no_labels;
    CHECK_THROWS_AS(loss_and_gradients(p, empty, no_labels), std::invalid_argument);
    CHECK_THROWS_AS(evaluate(p, empty, no_labels), std::invalid_argument);
    CHECK_THROWS_AS(train(empty, no_labels, NetworkShape{2, 2}, TrainConfig{}),
                    std::invalid_argument);

    TrainConfig bad;
    bad.batch_size = 0;
    const auto set = synthetic::make_separable_set(4, 1);
    CHECK_THROWS_AS(train(set.tensors, set.labels, NetworkShape{2, 2}, bad),
                    std::invalid_argument);
}
