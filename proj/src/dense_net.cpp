#include "tsad/dense_net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tsad/rng.hpp"

namespace tsad {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

void apply_sigmoid(Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = sigmoid(m(i, j));
}

void check_dims(const std::vector<int>& layer_dims) {
    if (layer_dims.size() < 2)
        throw std::invalid_argument("dense net needs at least input and output layers");
    for (int d : layer_dims)
        if (d < 1) throw std::invalid_argument("layer dimensions must be >= 1");
}

// Forward pass that keeps every layer's activation (batch rows).
std::vector<Matrix> forward_all(const DenseNet& net, const Matrix& batch) {
    std::vector<Matrix> acts;
    acts.reserve(net.weights.size() + 1);
    acts.push_back(batch);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        Matrix z = acts.back() * net.weights[l].transpose();
        z.rowwise() += net.biases[l].transpose();
        apply_sigmoid(z);
        acts.push_back(std::move(z));
    }
    return acts;
}

}  // namespace

bool DenseNet::all_finite() const {
    for (const auto& w : weights)
        if (!w.allFinite()) return false;
    for (const auto& b : biases)
        if (!b.allFinite()) return false;
    return true;
}

bool operator==(const DenseNet& a, const DenseNet& b) {
    if (a.layer_dims != b.layer_dims || a.activation != b.activation) return false;
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
        if (a.weights[l] != b.weights[l]) return false;
        if (a.biases[l] != b.biases[l]) return false;
    }
    return true;
}

DenseNet init_dense_net(const std::vector<int>& layer_dims, std::uint64_t seed) {
    check_dims(layer_dims);
    DenseNet net;
    net.layer_dims = layer_dims;
    Rng rng(derive_seed(seed, 0x77));
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const int fan_in = layer_dims[l];
        const int fan_out = layer_dims[l + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Matrix w(fan_out, fan_in);
        // Row-major fill order is part of the seeded scheme.
        for (int i = 0; i < fan_out; ++i)
            for (int j = 0; j < fan_in; ++j) w(i, j) = rng.uniform(-bound, bound);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(Vector::Zero(fan_out));
    }
    return net;
}

Matrix forward(const DenseNet& net, const Matrix& batch) {
    if (batch.cols() != net.input_dim())
        throw std::invalid_argument("forward: batch width does not match input layer");
    Matrix a = batch;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        Matrix z = a * net.weights[l].transpose();
        z.rowwise() += net.biases[l].transpose();
        apply_sigmoid(z);
        a = std::move(z);
    }
    return a;
}

double recon_loss(const Vector& x, const Vector& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("recon_loss: length mismatch");
    return (x - y).squaredNorm();
}

Gradients backward(const DenseNet& net, const Matrix& batch_in,
                   const Matrix& batch_target, double* loss_out) {
    if (batch_in.cols() != net.input_dim())
        throw std::invalid_argument("backward: batch width does not match input layer");
    if (batch_target.rows() != batch_in.rows() || batch_target.cols() != net.output_dim())
        throw std::invalid_argument("backward: target shape mismatch");

    const auto acts = forward_all(net, batch_in);
    const Matrix& out = acts.back();
    const double batch = static_cast<double>(batch_in.rows());

    if (loss_out != nullptr)
        *loss_out = (out - batch_target).squaredNorm() / batch;

    Gradients grads;
    grads.weights.resize(net.weights.size());
    grads.biases.resize(net.biases.size());

    // delta = dL/dz for the current layer; start from the squared-error
    // derivative through the output sigmoid.
    Matrix delta = (2.0 / batch) * (out - batch_target);
    delta.array() *= out.array() * (1.0 - out.array());
    for (int l = net.num_layers() - 1; l >= 0; --l) {
        grads.weights[l] = delta.transpose() * acts[l];
        grads.biases[l] = delta.colwise().sum().transpose();
        if (l > 0) {
            delta = (delta * net.weights[l]).eval();
            delta.array() *= acts[l].array() * (1.0 - acts[l].array());
        }
    }
    return grads;
}

AdamState AdamState::for_net(const DenseNet& net, double learning_rate) {
    AdamState s;
    s.learning_rate = learning_rate;
    for (const auto& w : net.weights) {
        s.m_weights.emplace_back(Matrix::Zero(w.rows(), w.cols()));
        s.v_weights.emplace_back(Matrix::Zero(w.rows(), w.cols()));
    }
    for (const auto& b : net.biases) {
        s.m_biases.emplace_back(Vector::Zero(b.size()));
        s.v_biases.emplace_back(Vector::Zero(b.size()));
    }
    return s;
}

namespace {

template <typename T>
void adam_update(T& param, T& m, T& v, const T& grad, double lr, double b1,
                 double b2, double eps, double bc1, double bc2) {
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad.array().square().matrix();
    param.array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
}

}  // namespace

void adam_step(DenseNet& net, AdamState& state, const Gradients& grads) {
    for (const auto& g : grads.weights)
        if (!g.allFinite()) throw std::runtime_error("adam_step: non-finite weight gradient");
    for (const auto& g : grads.biases)
        if (!g.allFinite()) throw std::runtime_error("adam_step: non-finite bias gradient");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        adam_update(net.weights[l], state.m_weights[l], state.v_weights[l],
                    grads.weights[l], state.learning_rate, state.beta1, state.beta2,
                    state.epsilon, bc1, bc2);
        adam_update(net.biases[l], state.m_biases[l], state.v_biases[l],
                    grads.biases[l], state.learning_rate, state.beta1, state.beta2,
                    state.epsilon, bc1, bc2);
    }
    if (!net.all_finite())
        throw std::runtime_error("adam_step: parameters became non-finite");
}

ParamCount count_params(const std::vector<double>& layer_dims) {
    double nodes = 0.0, edges = 0.0;
    for (std::size_t i = 1; i < layer_dims.size(); ++i) nodes += layer_dims[i];
    for (std::size_t i = 0; i + 1 < layer_dims.size(); ++i)
        edges += layer_dims[i] * layer_dims[i + 1];
    return {static_cast<long long>(std::floor(nodes)),
            static_cast<long long>(std::floor(edges))};
}

ParamCount count_params(const std::vector<int>& layer_dims) {
    return count_params(std::vector<double>(layer_dims.begin(), layer_dims.end()));
}

double mean_recon_loss(const DenseNet& net, const Matrix& x) {
    if (x.rows() == 0) return 0.0;
    const Matrix out = forward(net, x);
    return (out - x).squaredNorm() / static_cast<double>(x.rows());
}

std::vector<EpochLosses> train_autoencoder(DenseNet& net, const Matrix& train_x,
                                           const Matrix& val_x,
                                           const AutoencoderTrainParams& params) {
    if (train_x.rows() == 0) throw std::invalid_argument("train_autoencoder: empty training set");
    if (params.batch_size < 1) throw std::invalid_argument("train_autoencoder: batch_size must be >= 1");

    AdamState adam = AdamState::for_net(net, params.learning_rate);
    Rng shuffle_rng(derive_seed(params.seed, 0x5f));

    const int n = static_cast<int>(train_x.rows());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<EpochLosses> log;
    log.reserve(params.epochs);
    double best_val = std::numeric_limits<double>::infinity();
    int stall = 0;

    Matrix batch;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        for (int start = 0; start < n; start += params.batch_size) {
            const int b = std::min(params.batch_size, n - start);
            batch.resize(b, train_x.cols());
            for (int i = 0; i < b; ++i) batch.row(i) = train_x.row(order[start + i]);
            double batch_loss = 0.0;
            const Gradients grads = backward(net, batch, batch, &batch_loss);
            adam_step(net, adam, grads);
            loss_sum += batch_loss * b;
        }
        EpochLosses e;
        e.train = loss_sum / n;
        e.val = mean_recon_loss(net, val_x);
        if (!std::isfinite(e.train)) throw std::runtime_error("train_autoencoder: non-finite loss");
        log.push_back(e);

        if (params.early_stop && val_x.rows() > 0) {
            if (e.val < best_val - 1e-12) {
                best_val = e.val;
                stall = 0;
            } else if (++stall >= params.patience) {
                break;
            }
        }
    }
    return log;
}

}  // namespace tsad
