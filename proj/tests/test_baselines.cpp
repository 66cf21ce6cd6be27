#include <doctest.h>

#include <cstdio>
#include <unistd.h>

#include "tsad/baselines.hpp"
#include "tsad/model_io.hpp"
#include "tsad/rng.hpp"

using namespace tsad;

namespace {

Matrix random_window(int k, int m, Rng& rng) {
    Matrix w(k, m);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j) w(i, j) = rng.uniform();
    return w;
}

BaselineAE untrained(int k, int m, int mid_layers, std::uint64_t seed) {
    BaselineAE ae;
    ae.window_len = k;
    ae.signal_dim = m;
    ae.mid_layers = mid_layers;
    ae.net = init_dense_net(baseline_layer_dims(k * m, mid_layers), seed);
    return ae;
}

}  // namespace

TEST_CASE("baseline layer dims follow the 1/2, 1/4, 1/8 ladder") {
    CHECK(baseline_layer_dims(1220, 1) == std::vector<int>{1220, 610, 1220});
    CHECK(baseline_layer_dims(1220, 3) == std::vector<int>{1220, 610, 305, 610, 1220});
    CHECK(baseline_layer_dims(1220, 5) ==
          std::vector<int>{1220, 610, 305, 152, 305, 610, 1220});
    CHECK_THROWS_AS(baseline_layer_dims(100, 2), std::invalid_argument);
}

TEST_CASE("Table III AE-i rows via exact-ratio accounting") {
    CHECK(count_params(baseline_layer_dims_exact(1220, 1)) == ParamCount{1830, 1488400});
    CHECK(count_params(baseline_layer_dims_exact(1220, 3)) == ParamCount{2745, 1860500});
    CHECK(count_params(baseline_layer_dims_exact(1220, 5)) == ParamCount{3202, 1953525});
}

TEST_CASE("zero-parameter net on a 0.5 window reconstructs perfectly") {
    BaselineAE ae = untrained(3, 4, 1, 0);
    for (auto& w : ae.net.weights) w.setZero();
    const Matrix window = Matrix::Constant(3, 4, 0.5);
    CHECK(score_ae_window(ae, window) == 0.0);
    CHECK(score_ae_instant(ae, window) == 0.0);
}

TEST_CASE("window score decomposes into per-instant scores") {
    Rng rng(1);
    const BaselineAE ae = untrained(4, 3, 1, 5);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix w = random_window(4, 3, rng);
        const Matrix recon_flat = forward(ae.net, [&] {
            Matrix flat(1, 12);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 3; ++j) flat(0, i * 3 + j) = w(i, j);
            return flat;
        }());
        double per_instant_sum = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 3; ++j) {
                const double d = w(i, j) - recon_flat(0, i * 3 + j);
                per_instant_sum += d * d;
            }
        CHECK(score_ae_window(ae, w) == doctest::Approx(per_instant_sum).epsilon(1e-12));

        double last = 0.0;
        for (int j = 0; j < 3; ++j) {
            const double d = w(3, j) - recon_flat(0, 9 + j);
            last += d * d;
        }
        CHECK(score_ae_instant(ae, w) == doctest::Approx(last).epsilon(1e-12));
    }
}

TEST_CASE("window score dominates instant score") {
    Rng rng(2);
    for (int mid : {1, 3, 5}) {
        const BaselineAE ae = untrained(5, 4, mid, rng.next_u64());
        for (int rep = 0; rep < 25; ++rep) {
            const Matrix w = random_window(5, 4, rng);
            const double sw = score_ae_window(ae, w);
            const double si = score_ae_instant(ae, w);
            CHECK(sw >= si);
            CHECK(si >= 0.0);
        }
    }
}

TEST_CASE("train_ae reaches near-zero loss on constant data and is seeded") {
    TimeSeriesMatrix ts;
    ts.values = Matrix::Constant(100, 3, 0.5);
    ts.column_names = {"a", "b", "c"};
    const WindowSeries ws = make_windows(ts, 3, 1);

    TrainConfig cfg;
    cfg.epochs_ae1 = 40;
    cfg.lr_ae1 = 1e-2;
    cfg.batch_size = 8;
    cfg.seed = 3;
    const BaselineAE once = train_ae(ws, cfg);
    CHECK(once.final_train_loss < 1e-3);

    const BaselineAE twice = train_ae(ws, cfg);
    CHECK(once.net == twice.net);
}

TEST_CASE("batched baseline scoring equals per-window scoring") {
    Rng rng(3);
    const BaselineAE ae = untrained(4, 2, 3, 17);
    TimeSeriesMatrix ts;
    ts.values = Matrix(30, 2);
    for (long i = 0; i < 30; ++i)
        for (int j = 0; j < 2; ++j) ts.values(i, j) = rng.uniform();
    ts.column_names = {"a", "b"};
    const WindowSeries ws = make_windows(ts, 4, 1);

    const auto batch_w = score_windows(ae, ws, BaselineScoring::window);
    const auto batch_i = score_windows(ae, ws, BaselineScoring::instant);
    for (int i = 0; i < ws.count(); ++i) {
        CHECK(batch_w[i] == doctest::Approx(score_ae_window(ae, ws.window(i))).epsilon(1e-12));
        CHECK(batch_i[i] == doctest::Approx(score_ae_instant(ae, ws.window(i))).epsilon(1e-12));
    }
}

TEST_CASE("baseline container round trip keeps the scoring tag") {
    const BaselineAE ae = untrained(3, 3, 1, 23);
    const std::string path = "/tmp/tsad_test_baseline_" + std::to_string(::getpid());
    save_baseline(path, ae, BaselineScoring::instant);
    BaselineScoring scoring = BaselineScoring::window;
    const BaselineAE loaded = load_baseline(path, &scoring);
    CHECK(scoring == BaselineScoring::instant);
    CHECK(loaded.net == ae.net);
    std::remove(path.c_str());
}
