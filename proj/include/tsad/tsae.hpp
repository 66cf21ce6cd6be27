#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsad/dense_net.hpp"
#include "tsad/preprocessing.hpp"

namespace tsad {

struct TrainConfig {
    int epochs_ae1 = 200;
    int epochs_ae2 = 20;
    double lr_ae1 = 1e-4;
    double lr_ae2 = 1e-3;
    int batch_size = 256;
    std::uint64_t seed = 0;
    // Hidden layer sizes of the window autoencoder; empty means the
    // single-layer default floor(ae1_hidden_ratio * m * K).
    std::vector<int> ae1_hidden;
    double ae1_hidden_ratio = 0.5;
    double ae2_hidden_ratio = 0.1;
    bool early_stop = false;
    double split_ratio_val = 0.2;  // 4:1 split
};

// Two-stage autoencoder. ae1 reconstructs whole flattened windows (the
// slowly varying, globally correlated part); ae2 reconstructs the
// per-instant residual x_t - x'_t left over by ae1. ae1 is trained first
// and frozen before ae2 ever sees a gradient.
struct TSAEModel {
    DenseNet ae1;  // m*K -> ... -> m*K
    DenseNet ae2;  // m -> floor(m/10) -> m
    int window_len = 0;
    int signal_dim = 0;

    int epochs_ae1 = 0, epochs_ae2 = 0;
    double final_train_loss_ae1 = 0.0, final_val_loss_ae1 = 0.0;
    double final_train_loss_ae2 = 0.0, final_val_loss_ae2 = 0.0;
};

struct TrainingLog {
    std::vector<EpochLosses> ae1;
    std::vector<EpochLosses> ae2;
};

// Two-step training: ae1 on flattened windows, then ae2 on the residuals
// computed from the frozen ae1. Deterministic under a fixed seed.
TSAEModel train_tsae(const WindowSeries& train_windows, const TrainConfig& cfg,
                     TrainingLog* log = nullptr);

struct Reconstruction {
    Vector x_prime;   // last-instant slice of ae1's window reconstruction
    Vector dx_prime;  // ae2's reconstruction of the residual
    Vector r;         // x_prime + dx_prime
};

// One window (K x m) through both stages.
Reconstruction reconstruct(const TSAEModel& model, const Matrix& window);

// Squared L2 distance between the window's final instant and R_t.
double anomaly_score(const TSAEModel& model, const Matrix& window);

// Per-window scores for a whole series, computed in batch.
std::vector<double> score_windows(const TSAEModel& model, const WindowSeries& windows);

// y = 1 iff score > threshold (strict).
std::vector<int> detect(const std::vector<double>& scores, double threshold);
std::vector<int> detect(const TSAEModel& model, const WindowSeries& windows, double threshold);

// Batched stage-1 outputs for a window set: the last-instant slices of
// ae1's reconstructions (rows) and the residuals dx (rows). Feeds both
// ae2 training and the correlation-separation check.
struct StageOneOutputs {
    Matrix x_prime;  // n x m
    Matrix dx;       // n x m
};
StageOneOutputs stage_one_outputs(const DenseNet& ae1, const Matrix& flat_windows,
                                  int window_len, int signal_dim);

// Default architecture helpers.
std::vector<int> tsae_ae1_dims(int window_len, int signal_dim, const TrainConfig& cfg);
std::vector<int> tsae_ae2_dims(int signal_dim, const TrainConfig& cfg);

// Convenience wrappers around the shared model container.
void save_tsae(const std::string& path, const TSAEModel& model);
TSAEModel load_tsae(const std::string& path);

}  // namespace tsad
