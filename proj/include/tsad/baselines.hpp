#pragma once

#include <string>
#include <vector>

#include "tsad/dense_net.hpp"
#include "tsad/preprocessing.hpp"
#include "tsad/tsae.hpp"

namespace tsad {

// Single autoencoder on flattened windows, trained exactly like the TSAE's
// first stage. The same trained net can be scored per window (AE-w) or on
// the final instant only (AE-i).
struct BaselineAE {
    DenseNet net;
    int window_len = 0;
    int signal_dim = 0;
    int mid_layers = 1;
    int epochs = 0;
    double final_train_loss = 0.0, final_val_loss = 0.0;
};

// Symmetric layer sizes for 1/3/5 intermediate layers:
//   1 -> 1/2 -> 1
//   1 -> 1/2 -> 1/4 -> 1/2 -> 1
//   1 -> 1/2 -> 1/4 -> 1/8 -> 1/4 -> 1/2 -> 1
// Fractional sizes are floored when building an actual network; the
// double overload keeps them exact for node/edge accounting.
std::vector<int> baseline_layer_dims(int input_dim, int mid_layers);
std::vector<double> baseline_layer_dims_exact(double input_dim, int mid_layers);

BaselineAE train_ae(const WindowSeries& train_windows, const TrainConfig& cfg,
                    int mid_layers = 1, std::vector<EpochLosses>* log = nullptr);

// AE-w: squared L2 over the whole reconstructed window.
double score_ae_window(const BaselineAE& ae, const Matrix& window);
// AE-i: squared L2 over the final instant's m components only.
double score_ae_instant(const BaselineAE& ae, const Matrix& window);

enum class BaselineScoring { window, instant };
std::vector<double> score_windows(const BaselineAE& ae, const WindowSeries& windows,
                                  BaselineScoring scoring);

void save_baseline(const std::string& path, const BaselineAE& ae, BaselineScoring scoring);
BaselineAE load_baseline(const std::string& path, BaselineScoring* scoring = nullptr);

}  // namespace tsad
