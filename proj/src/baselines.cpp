#include "tsad/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsad/model_io.hpp"
#include "tsad/rng.hpp"

namespace tsad {

std::vector<double> baseline_layer_dims_exact(double input_dim, int mid_layers) {
    if (mid_layers != 1 && mid_layers != 3 && mid_layers != 5)
        throw std::invalid_argument("baseline_layer_dims: mid_layers must be 1, 3 or 5");
    std::vector<double> ratios;
    const int depth = (mid_layers + 1) / 2;  // halvings on the encoder side
    for (int i = 0; i <= depth; ++i) ratios.push_back(std::ldexp(1.0, -i));
    std::vector<double> dims;
    for (int i = 0; i <= depth; ++i) dims.push_back(input_dim * ratios[i]);
    for (int i = depth - 1; i >= 0; --i) dims.push_back(input_dim * ratios[i]);
    return dims;
}

std::vector<int> baseline_layer_dims(int input_dim, int mid_layers) {
    const std::vector<double> exact = baseline_layer_dims_exact(input_dim, mid_layers);
    std::vector<int> dims;
    dims.reserve(exact.size());
    for (double d : exact) dims.push_back(std::max(1, static_cast<int>(std::floor(d))));
    return dims;
}

BaselineAE train_ae(const WindowSeries& train_windows, const TrainConfig& cfg,
                    int mid_layers, std::vector<EpochLosses>* log) {
    const int n = train_windows.count();
    const int m = static_cast<int>(train_windows.signal_dim());
    const int k = train_windows.window_len;

    const TrainValSplit split = split_train_val(n, cfg.seed);
    const Matrix train_x = train_windows.flatten_subset(split.train_indices);
    const Matrix val_x = train_windows.flatten_subset(split.val_indices);

    BaselineAE ae;
    ae.window_len = k;
    ae.signal_dim = m;
    ae.mid_layers = mid_layers;
    ae.epochs = cfg.epochs_ae1;
    // Same init/shuffle streams as the TSAE's first stage: with one mid
    // layer and the same seed the two train identically.
    ae.net = init_dense_net(
        mid_layers == 1 ? tsae_ae1_dims(k, m, cfg) : baseline_layer_dims(k * m, mid_layers),
        derive_seed(cfg.seed, 1));

    AutoencoderTrainParams p;
    p.epochs = cfg.epochs_ae1;
    p.learning_rate = cfg.lr_ae1;
    p.batch_size = cfg.batch_size;
    p.seed = derive_seed(cfg.seed, 2);
    p.early_stop = cfg.early_stop;
    const auto losses = train_autoencoder(ae.net, train_x, val_x, p);
    if (!losses.empty()) {
        ae.final_train_loss = losses.back().train;
        ae.final_val_loss = losses.back().val;
    }
    if (log != nullptr) *log = losses;
    return ae;
}

namespace {

Vector flatten_window(const Matrix& window) {
    const long k = window.rows();
    const long m = window.cols();
    Vector flat(k * m);
    for (long i = 0; i < k; ++i) flat.segment(i * m, m) = window.row(i).transpose();
    return flat;
}

}  // namespace

double score_ae_window(const BaselineAE& ae, const Matrix& window) {
    if (window.rows() != ae.window_len || window.cols() != ae.signal_dim)
        throw std::invalid_argument("score_ae_window: window shape mismatch");
    const Vector flat = flatten_window(window);
    const Vector recon = forward(ae.net, flat.transpose()).row(0).transpose();
    return recon_loss(flat, recon);
}

double score_ae_instant(const BaselineAE& ae, const Matrix& window) {
    if (window.rows() != ae.window_len || window.cols() != ae.signal_dim)
        throw std::invalid_argument("score_ae_instant: window shape mismatch");
    const Vector flat = flatten_window(window);
    const Vector recon = forward(ae.net, flat.transpose()).row(0).transpose();
    const long m = ae.signal_dim;
    const long last = static_cast<long>(ae.window_len - 1) * m;
    return recon_loss(flat.segment(last, m), recon.segment(last, m));
}

std::vector<double> score_windows(const BaselineAE& ae, const WindowSeries& windows,
                                  BaselineScoring scoring) {
    if (windows.signal_dim() != ae.signal_dim || windows.window_len != ae.window_len)
        throw std::invalid_argument("score_windows: window shape does not match the model");
    const Matrix flat = windows.flatten_all();
    const Matrix recon = forward(ae.net, flat);
    std::vector<double> scores(static_cast<std::size_t>(flat.rows()));
    if (scoring == BaselineScoring::window) {
        for (long i = 0; i < flat.rows(); ++i)
            scores[static_cast<std::size_t>(i)] = (flat.row(i) - recon.row(i)).squaredNorm();
    } else {
        const long m = ae.signal_dim;
        const long last = static_cast<long>(ae.window_len - 1) * m;
        for (long i = 0; i < flat.rows(); ++i)
            scores[static_cast<std::size_t>(i)] =
                (flat.block(i, last, 1, m) - recon.block(i, last, 1, m)).squaredNorm();
    }
    return scores;
}

void save_baseline(const std::string& path, const BaselineAE& ae, BaselineScoring scoring) {
    ModelBundle bundle;
    bundle.kind = scoring == BaselineScoring::window ? ModelKind::ae_window
                                                     : ModelKind::ae_instant;
    bundle.window_len = ae.window_len;
    bundle.signal_dim = ae.signal_dim;
    bundle.ae1 = ae.net;
    bundle.column_names.resize(ae.signal_dim);
    bundle.scaling.col_min = Vector::Zero(ae.signal_dim);
    bundle.scaling.col_max = Vector::Ones(ae.signal_dim);
    bundle.scaling.constant.assign(ae.signal_dim, false);
    bundle.meta.epochs_ae1 = ae.epochs;
    bundle.meta.final_train_loss_ae1 = ae.final_train_loss;
    bundle.meta.final_val_loss_ae1 = ae.final_val_loss;
    save_model(path, bundle);
}

BaselineAE load_baseline(const std::string& path, BaselineScoring* scoring) {
    const ModelBundle bundle = load_model(path);
    if (bundle.kind == ModelKind::tsae)
        throw std::runtime_error(path + ": tsae model is not a baseline");
    BaselineAE ae;
    ae.net = bundle.ae1;
    ae.window_len = bundle.window_len;
    ae.signal_dim = bundle.signal_dim;
    ae.mid_layers = static_cast<int>(ae.net.layer_dims.size()) - 2;
    ae.epochs = bundle.meta.epochs_ae1;
    ae.final_train_loss = bundle.meta.final_train_loss_ae1;
    ae.final_val_loss = bundle.meta.final_val_loss_ae1;
    if (scoring != nullptr)
        *scoring = bundle.kind == ModelKind::ae_window ? BaselineScoring::window
                                                       : BaselineScoring::instant;
    return ae;
}

}  // namespace tsad
