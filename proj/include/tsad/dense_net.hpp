#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsad/types.hpp"

namespace tsad {

// Numerically stable logistic function.
double sigmoid(double z);

// Fully connected network with a sigmoid at every hidden AND output layer,
// so every output lies strictly in (0, 1). weights[i] maps layer i to
// layer i+1 and has shape layer_dims[i+1] x layer_dims[i].
struct DenseNet {
    std::vector<int> layer_dims;
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
    std::string activation = "sigmoid";

    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }
    int num_layers() const { return static_cast<int>(weights.size()); }

    bool all_finite() const;
};

bool operator==(const DenseNet& a, const DenseNet& b);

// Per-parameter gradients, same shapes as the network.
struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
};

struct AdamState {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step = 0;
    std::vector<Matrix> m_weights, v_weights;
    std::vector<Vector> m_biases, v_biases;

    static AdamState for_net(const DenseNet& net, double learning_rate);
};

// Glorot-style init: weights uniform in +-sqrt(6/(fan_in+fan_out)),
// biases zero. Identical seed gives a bit-identical network.
DenseNet init_dense_net(const std::vector<int>& layer_dims, std::uint64_t seed);

// Batched forward pass; batch is B x input_dim, result B x output_dim.
Matrix forward(const DenseNet& net, const Matrix& batch);

// Squared L2 norm of (x - y).
double recon_loss(const Vector& x, const Vector& y);

// Exact gradient of the mean-over-batch of recon_loss(target, output).
// Optionally reports that loss through loss_out.
Gradients backward(const DenseNet& net, const Matrix& batch_in,
                   const Matrix& batch_target, double* loss_out = nullptr);

// Standard Adam update with bias correction. Throws if a gradient is
// non-finite or if the update produces non-finite parameters.
void adam_step(DenseNet& net, AdamState& state, const Gradients& grads);

struct ParamCount {
    long long nodes = 0;
    long long edges = 0;
    bool operator==(const ParamCount&) const = default;
};

// nodes = sum of all non-input layer sizes, edges = sum of fan_in*fan_out
// over adjacent layers (biases excluded). The fractional overload exists
// because published node/edge tables for ratio-defined architectures are
// computed on the unrounded layer sizes; both sums are floored at the end.
ParamCount count_params(const std::vector<double>& layer_dims);
ParamCount count_params(const std::vector<int>& layer_dims);

// Autoencoder training: minibatch Adam on the mean squared-L2
// reconstruction loss, targets equal to inputs.
struct AutoencoderTrainParams {
    int epochs = 200;
    double learning_rate = 1e-4;
    int batch_size = 256;
    std::uint64_t seed = 0;
    bool early_stop = false;  // stop when val loss stalls for `patience` epochs
    int patience = 10;
};

struct EpochLosses {
    double train = 0.0;
    double val = 0.0;
};

// Trains `net` in place on the rows of `train_x` (one sample per row);
// `val_x` is only evaluated for logging (and the optional early stop).
// Deterministic for a fixed seed: one shuffle per epoch, fixed batch
// order, single-threaded.
std::vector<EpochLosses> train_autoencoder(DenseNet& net, const Matrix& train_x,
                                           const Matrix& val_x,
                                           const AutoencoderTrainParams& params);

// Mean per-sample reconstruction loss of the autoencoder over `x`.
double mean_recon_loss(const DenseNet& net, const Matrix& x);

}  // namespace tsad
