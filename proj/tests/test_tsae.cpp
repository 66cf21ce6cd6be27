#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <vector>

#include "tsad/model_io.hpp"
#include "tsad/rng.hpp"
#include "tsad/tsae.hpp"

using namespace tsad;

namespace {

Matrix random_window(int k, int m, Rng& rng, double lo = 0.0, double hi = 1.0) {
    Matrix w(k, m);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j) w(i, j) = rng.uniform(lo, hi);
    return w;
}

// Untrained model with freshly initialized nets.
TSAEModel random_model(int k, int m, std::uint64_t seed) {
    TrainConfig cfg;
    TSAEModel model;
    model.window_len = k;
    model.signal_dim = m;
    model.ae1 = init_dense_net(tsae_ae1_dims(k, m, cfg), derive_seed(seed, 1));
    model.ae2 = init_dense_net(tsae_ae2_dims(m, cfg), derive_seed(seed, 3));
    return model;
}

WindowSeries constant_windows(int t, int m, int k, double value) {
    TimeSeriesMatrix ts;
    ts.values = Matrix::Constant(t, m, value);
    for (int j = 0; j < m; ++j) ts.column_names.push_back("s" + std::to_string(j));
    return make_windows(ts, k, 1);
}

std::string temp_path(const char* name) {
    return std::string("/tmp/tsad_test_") + name + "_" + std::to_string(::getpid());
}

}  // namespace

TEST_CASE("default architecture dimensions (m=122, K=10)") {
    TrainConfig cfg;
    CHECK(tsae_ae1_dims(10, 122, cfg) == std::vector<int>{1220, 610, 1220});
    CHECK(tsae_ae2_dims(122, cfg) == std::vector<int>{122, 12, 122});
}

TEST_CASE("reconstruct: composition identity and chained oracle") {
    Rng rng(1);
    const TSAEModel model = random_model(4, 5, 99);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix w = random_window(4, 5, rng);
        const Reconstruction rec = reconstruct(model, w);

        // Eq-by-eq chained oracle: ae1 forward, slice, subtract, ae2
        // forward, add. Must agree bit for bit.
        Matrix flat(1, 20);
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 5; ++j) flat(0, k * 5 + j) = w(k, j);
        const Matrix w_prime = forward(model.ae1, flat);
        Vector x_prime(5), x_t(5);
        for (int j = 0; j < 5; ++j) {
            x_prime(j) = w_prime(0, 15 + j);
            x_t(j) = w(3, j);
        }
        const Vector dx = x_t - x_prime;
        const Vector dx_prime = forward(model.ae2, dx.transpose()).row(0).transpose();
        CHECK((rec.x_prime - x_prime).cwiseAbs().maxCoeff() == 0.0);
        CHECK((rec.dx_prime - dx_prime).cwiseAbs().maxCoeff() == 0.0);

        // R - x' == dx' exactly, by construction.
        CHECK(((rec.r - rec.x_prime) - rec.dx_prime).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK_THROWS_AS(reconstruct(model, Matrix::Zero(3, 5)), std::invalid_argument);
}

TEST_CASE("an identity residual stage reproduces the input exactly") {
    // Dyadic values keep the float algebra exact: if dx' == dx then
    // R = x' + (x - x') == x bit for bit.
    const Vector x = (Vector(3) << 0.75, 0.5, 0.25).finished();
    const Vector x_prime = (Vector(3) << 0.5, 0.25, 0.125).finished();
    const Vector dx = x - x_prime;
    const Vector r = x_prime + dx;
    CHECK((r - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("anomaly_score values and equality with recon_loss") {
    Rng rng(2);
    const TSAEModel model = random_model(3, 4, 7);
    for (int rep = 0; rep < 50; ++rep) {
        const Matrix w = random_window(3, 4, rng);
        const Reconstruction rec = reconstruct(model, w);
        const Vector x_t = w.row(2).transpose();
        CHECK(anomaly_score(model, w) == recon_loss(x_t, rec.r));
        CHECK(anomaly_score(model, w) >= 0.0);
    }

    // x_t - R_t = (0.1, -0.2) gives 0.05.
    const Vector a = (Vector(2) << 0.1, -0.2).finished();
    CHECK(recon_loss(a, Vector::Zero(2)) == doctest::Approx(0.05).epsilon(1e-12));
    // Perfect reconstruction scores zero.
    CHECK(recon_loss(a, a) == 0.0);
}

TEST_CASE("batched scoring equals per-window scoring") {
    Rng rng(3);
    const TSAEModel model = random_model(5, 3, 11);
    TimeSeriesMatrix ts;
    ts.values = Matrix(40, 3);
    for (long i = 0; i < 40; ++i)
        for (int j = 0; j < 3; ++j) ts.values(i, j) = rng.uniform();
    ts.column_names = {"a", "b", "c"};
    const WindowSeries ws = make_windows(ts, 5, 1);
    const std::vector<double> batch = score_windows(model, ws);
    REQUIRE(batch.size() == static_cast<std::size_t>(ws.count()));
    for (int i = 0; i < ws.count(); ++i)
        CHECK(batch[i] == doctest::Approx(anomaly_score(model, ws.window(i))).epsilon(1e-12));
}

TEST_CASE("detect thresholds strictly") {
    const std::vector<double> scores{0.1, 0.5, 0.9};
    CHECK(detect(scores, 1.0) == std::vector<int>{0, 0, 0});
    CHECK(detect(scores, -1.0) == std::vector<int>{1, 1, 1});
    CHECK(detect(scores, 0.5) == std::vector<int>{0, 0, 1});  // strict >

    Rng rng(4);
    std::vector<double> s(100);
    for (auto& v : s) v = rng.uniform(0.0, 2.0);
    const double lambda = 1.0;
    const std::vector<int> labels = detect(s, lambda);
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(labels[i] == (s[i] > lambda ? 1 : 0));
    CHECK_THROWS_AS(detect(s, std::nan("")), std::invalid_argument);
}

TEST_CASE("train_tsae learns constant data quickly") {
    const WindowSeries ws = constant_windows(120, 3, 4, 0.5);
    TrainConfig cfg;
    cfg.epochs_ae1 = 50;
    cfg.epochs_ae2 = 10;
    cfg.lr_ae1 = 1e-2;
    cfg.lr_ae2 = 1e-2;
    cfg.batch_size = 8;
    cfg.seed = 5;
    TrainingLog log;
    const TSAEModel model = train_tsae(ws, cfg, &log);
    CHECK(model.final_train_loss_ae1 < 1e-3);
    REQUIRE(log.ae1.size() == 50);
    CHECK(log.ae1.front().train > log.ae1.back().train);
}

TEST_CASE("train_tsae is deterministic and freezes ae1 before stage 2") {
    Rng rng(6);
    TimeSeriesMatrix ts;
    ts.values = Matrix(80, 3);
    for (long i = 0; i < 80; ++i)
        for (int j = 0; j < 3; ++j) ts.values(i, j) = rng.uniform(0.2, 0.8);
    ts.column_names = {"a", "b", "c"};
    const WindowSeries ws = make_windows(ts, 4, 1);

    TrainConfig cfg;
    cfg.epochs_ae1 = 8;
    cfg.epochs_ae2 = 6;
    cfg.batch_size = 16;
    cfg.seed = 77;

    const TSAEModel once = train_tsae(ws, cfg);
    const TSAEModel twice = train_tsae(ws, cfg);
    CHECK(once.ae1 == twice.ae1);
    CHECK(once.ae2 == twice.ae2);

    // Stage 2 must not touch ae1: training with zero stage-2 epochs yields
    // bit-identical ae1 weights.
    TrainConfig no_stage2 = cfg;
    no_stage2.epochs_ae2 = 0;
    const TSAEModel frozen = train_tsae(ws, no_stage2);
    CHECK(frozen.ae1 == once.ae1);
}

TEST_CASE("ae2 explains part of the residual on two-component data") {
    // Long component: slow ramp shared by all signals; short component:
    // one white driver mixed into a signal subset.
    Rng rng(7);
    const long t_len = 600;
    const int m = 6;
    Matrix v(t_len, m);
    for (long t = 0; t < t_len; ++t) {
        const double slow = 0.5 + 0.3 * std::sin(2.0 * std::numbers::pi * t / 300.0);
        const double fast = 0.05 * rng.normal();
        for (int j = 0; j < m; ++j)
            v(t, j) = slow + (j < 3 ? fast : -fast) + 0.005 * rng.normal();
    }
    TimeSeriesMatrix ts;
    ts.values = v;
    for (int j = 0; j < m; ++j) ts.column_names.push_back("s" + std::to_string(j));
    const WindowSeries ws = make_windows(ts, 5, 1);

    TrainConfig cfg;
    cfg.epochs_ae1 = 30;
    cfg.epochs_ae2 = 30;
    cfg.lr_ae1 = 1e-3;
    cfg.lr_ae2 = 1e-2;
    cfg.batch_size = 32;
    cfg.seed = 13;
    const TSAEModel model = train_tsae(ws, cfg);

    const Matrix flat = ws.flatten_all();
    const StageOneOutputs s1 = stage_one_outputs(model.ae1, flat, 5, m);
    const Matrix dx_prime = forward(model.ae2, s1.dx);
    const double before = s1.dx.squaredNorm();
    const double after = (s1.dx - dx_prime).squaredNorm();
    CHECK(after < before);
}

TEST_CASE("model file round trip preserves scores bit-exactly") {
    Rng rng(8);
    const TSAEModel model = random_model(4, 6, 123);
    const std::string path = temp_path("roundtrip");
    save_tsae(path, model);
    const TSAEModel loaded = load_tsae(path);
    CHECK(loaded.ae1 == model.ae1);
    CHECK(loaded.ae2 == model.ae2);
    CHECK(loaded.window_len == model.window_len);
    CHECK(loaded.signal_dim == model.signal_dim);
    for (int rep = 0; rep < 100; ++rep) {
        const Matrix w = random_window(4, 6, rng, -0.5, 1.5);
        CHECK(anomaly_score(model, w) == anomaly_score(loaded, w));
    }
    std::remove(path.c_str());
}

TEST_CASE("model loading rejects corrupt and mismatched files") {
    const TSAEModel model = random_model(3, 4, 9);
    const std::string path = temp_path("corrupt");
    save_tsae(path, model);

    // Wrong m in the header trips the dimension check.
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8 + 4 + 1 + 4);  // magic, version, kind, window_len
        const std::int32_t wrong_m = 5;
        f.write(reinterpret_cast<const char*>(&wrong_m), sizeof(wrong_m));
    }
    CHECK_THROWS_WITH_AS(static_cast<void>(load_model(path)),
                         doctest::Contains("column count"), std::runtime_error);

    // Unsupported version.
    save_tsae(path, model);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8);
        const std::uint32_t bad_version = 999;
        f.write(reinterpret_cast<const char*>(&bad_version), sizeof(bad_version));
    }
    CHECK_THROWS_WITH_AS(static_cast<void>(load_model(path)),
                         doctest::Contains("version"), std::runtime_error);

    // Bad magic.
    save_tsae(path, model);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("NOTMODEL", 8);
    }
    CHECK_THROWS_WITH_AS(static_cast<void>(load_model(path)),
                         doctest::Contains("magic"), std::runtime_error);

    // Truncated file.
    save_tsae(path, model);
    {
        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    CHECK_THROWS_AS(static_cast<void>(load_model(path)), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("fresh model save file reloads with identical layer dims") {
    const TSAEModel model = random_model(6, 2, 42);
    const std::string path = temp_path("dims");
    save_tsae(path, model);
    const TSAEModel loaded = load_tsae(path);
    CHECK(loaded.ae1.layer_dims == model.ae1.layer_dims);
    CHECK(loaded.ae2.layer_dims == model.ae2.layer_dims);
    std::remove(path.c_str());
}
