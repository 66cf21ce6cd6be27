#include "tsad/tsae.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsad/model_io.hpp"
#include "tsad/rng.hpp"

namespace tsad {

std::vector<int> tsae_ae1_dims(int window_len, int signal_dim, const TrainConfig& cfg) {
    const int input = window_len * signal_dim;
    std::vector<int> dims{input};
    if (cfg.ae1_hidden.empty()) {
        dims.push_back(std::max(1, static_cast<int>(std::floor(cfg.ae1_hidden_ratio * input))));
    } else {
        // Encoder halves mirrored into the decoder are given explicitly.
        for (int h : cfg.ae1_hidden) dims.push_back(h);
    }
    dims.push_back(input);
    return dims;
}

std::vector<int> tsae_ae2_dims(int signal_dim, const TrainConfig& cfg) {
    const int hidden = std::max(1, static_cast<int>(std::floor(cfg.ae2_hidden_ratio * signal_dim)));
    return {signal_dim, hidden, signal_dim};
}

StageOneOutputs stage_one_outputs(const DenseNet& ae1, const Matrix& flat_windows,
                                  int window_len, int signal_dim) {
    if (flat_windows.cols() != static_cast<long>(window_len) * signal_dim)
        throw std::invalid_argument("stage_one_outputs: window width mismatch");
    const Matrix recon = forward(ae1, flat_windows);
    const long m = signal_dim;
    const long last = static_cast<long>(window_len - 1) * m;
    StageOneOutputs out;
    out.x_prime = recon.middleCols(last, m);
    out.dx = flat_windows.middleCols(last, m) - out.x_prime;
    return out;
}

TSAEModel train_tsae(const WindowSeries& train_windows, const TrainConfig& cfg,
                     TrainingLog* log) {
    const int n = train_windows.count();
    const int m = static_cast<int>(train_windows.signal_dim());
    const int k = train_windows.window_len;

    const TrainValSplit split = split_train_val(n, cfg.seed);
    const Matrix train_x = train_windows.flatten_subset(split.train_indices);
    const Matrix val_x = train_windows.flatten_subset(split.val_indices);

    TSAEModel model;
    model.window_len = k;
    model.signal_dim = m;
    model.epochs_ae1 = cfg.epochs_ae1;
    model.epochs_ae2 = cfg.epochs_ae2;

    // STEP 1: the window autoencoder.
    model.ae1 = init_dense_net(tsae_ae1_dims(k, m, cfg), derive_seed(cfg.seed, 1));
    AutoencoderTrainParams p1;
    p1.epochs = cfg.epochs_ae1;
    p1.learning_rate = cfg.lr_ae1;
    p1.batch_size = cfg.batch_size;
    p1.seed = derive_seed(cfg.seed, 2);
    p1.early_stop = cfg.early_stop;
    const auto log1 = train_autoencoder(model.ae1, train_x, val_x, p1);
    if (!log1.empty()) {
        model.final_train_loss_ae1 = log1.back().train;
        model.final_val_loss_ae1 = log1.back().val;
    }

    // STEP 2: residuals from the now-frozen ae1. They are precomputed once,
    // which is equivalent to re-deriving them every epoch.
    const Matrix dx_train = stage_one_outputs(model.ae1, train_x, k, m).dx;
    const Matrix dx_val = val_x.rows() > 0
                              ? stage_one_outputs(model.ae1, val_x, k, m).dx
                              : Matrix(0, m);

    model.ae2 = init_dense_net(tsae_ae2_dims(m, cfg), derive_seed(cfg.seed, 3));
    AutoencoderTrainParams p2;
    p2.epochs = cfg.epochs_ae2;
    p2.learning_rate = cfg.lr_ae2;
    p2.batch_size = cfg.batch_size;
    p2.seed = derive_seed(cfg.seed, 4);
    p2.early_stop = cfg.early_stop;
    const auto log2 = train_autoencoder(model.ae2, dx_train, dx_val, p2);
    if (!log2.empty()) {
        model.final_train_loss_ae2 = log2.back().train;
        model.final_val_loss_ae2 = log2.back().val;
    }

    if (log != nullptr) {
        log->ae1 = log1;
        log->ae2 = log2;
    }
    return model;
}

Reconstruction reconstruct(const TSAEModel& model, const Matrix& window) {
    if (window.rows() != model.window_len || window.cols() != model.signal_dim)
        throw std::invalid_argument("reconstruct: window shape mismatch");

    const long m = model.signal_dim;
    Matrix flat(1, model.window_len * m);
    for (int k = 0; k < model.window_len; ++k)
        flat.block(0, static_cast<long>(k) * m, 1, m) = window.row(k);

    const Matrix w_prime = forward(model.ae1, flat);
    Reconstruction rec;
    rec.x_prime = w_prime.block(0, static_cast<long>(model.window_len - 1) * m, 1, m).transpose();
    const Vector x_t = window.row(model.window_len - 1).transpose();
    const Vector dx = x_t - rec.x_prime;
    rec.dx_prime = forward(model.ae2, dx.transpose()).row(0).transpose();
    rec.r = rec.x_prime + rec.dx_prime;
    return rec;
}

double anomaly_score(const TSAEModel& model, const Matrix& window) {
    const Reconstruction rec = reconstruct(model, window);
    const Vector x_t = window.row(model.window_len - 1).transpose();
    return recon_loss(x_t, rec.r);
}

std::vector<double> score_windows(const TSAEModel& model, const WindowSeries& windows) {
    if (windows.signal_dim() != model.signal_dim || windows.window_len != model.window_len)
        throw std::invalid_argument("score_windows: window shape does not match the model");
    const Matrix flat = windows.flatten_all();
    const StageOneOutputs s1 = stage_one_outputs(model.ae1, flat, model.window_len,
                                                 model.signal_dim);
    const Matrix dx_prime = forward(model.ae2, s1.dx);
    const Matrix r = s1.x_prime + dx_prime;
    const Matrix x_t = flat.rightCols(model.signal_dim);

    std::vector<double> scores(static_cast<std::size_t>(flat.rows()));
    for (long i = 0; i < flat.rows(); ++i)
        scores[static_cast<std::size_t>(i)] = (x_t.row(i) - r.row(i)).squaredNorm();
    return scores;
}

std::vector<int> detect(const std::vector<double>& scores, double threshold) {
    if (!std::isfinite(threshold)) throw std::invalid_argument("detect: threshold must be finite");
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] > threshold ? 1 : 0;
    return labels;
}

std::vector<int> detect(const TSAEModel& model, const WindowSeries& windows, double threshold) {
    return detect(score_windows(model, windows), threshold);
}

void save_tsae(const std::string& path, const TSAEModel& model) {
    ModelBundle bundle;
    bundle.kind = ModelKind::tsae;
    bundle.window_len = model.window_len;
    bundle.signal_dim = model.signal_dim;
    bundle.ae1 = model.ae1;
    bundle.ae2 = model.ae2;
    bundle.column_names.resize(model.signal_dim);
    bundle.scaling.col_min = Vector::Zero(model.signal_dim);
    bundle.scaling.col_max = Vector::Ones(model.signal_dim);
    bundle.scaling.constant.assign(model.signal_dim, false);
    bundle.meta.epochs_ae1 = model.epochs_ae1;
    bundle.meta.epochs_ae2 = model.epochs_ae2;
    bundle.meta.final_train_loss_ae1 = model.final_train_loss_ae1;
    bundle.meta.final_val_loss_ae1 = model.final_val_loss_ae1;
    bundle.meta.final_train_loss_ae2 = model.final_train_loss_ae2;
    bundle.meta.final_val_loss_ae2 = model.final_val_loss_ae2;
    save_model(path, bundle);
}

TSAEModel load_tsae(const std::string& path) {
    const ModelBundle bundle = load_model(path);
    if (bundle.kind != ModelKind::tsae)
        throw std::runtime_error(path + ": not a tsae model");
    TSAEModel model;
    model.ae1 = bundle.ae1;
    model.ae2 = *bundle.ae2;
    model.window_len = bundle.window_len;
    model.signal_dim = bundle.signal_dim;
    model.epochs_ae1 = bundle.meta.epochs_ae1;
    model.epochs_ae2 = bundle.meta.epochs_ae2;
    model.final_train_loss_ae1 = bundle.meta.final_train_loss_ae1;
    model.final_val_loss_ae1 = bundle.meta.final_val_loss_ae1;
    model.final_train_loss_ae2 = bundle.meta.final_train_loss_ae2;
    model.final_val_loss_ae2 = bundle.meta.final_val_loss_ae2;
    return model;
}

}  // namespace tsad
