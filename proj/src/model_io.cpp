#include "tsad/model_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <type_traits>

namespace tsad {

namespace {

constexpr char kMagic[8] = {'T', 'S', 'A', 'D', 'M', 'D', 'L', '\n'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("model file truncated");
    return v;
}

void put_string(std::ostream& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
    const auto n = get<std::uint32_t>(in);
    if (n > (1u << 20)) throw std::runtime_error("model file corrupt: oversized string");
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw std::runtime_error("model file truncated");
    return s;
}

void put_net(std::ostream& out, const DenseNet& net) {
    put_string(out, net.activation);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(net.layer_dims.size()));
    for (int d : net.layer_dims) put<std::int32_t>(out, d);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        const Matrix& w = net.weights[l];
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) put<double>(out, w(i, j));
        const Vector& b = net.biases[l];
        for (Eigen::Index i = 0; i < b.size(); ++i) put<double>(out, b(i));
    }
}

DenseNet get_net(std::istream& in) {
    DenseNet net;
    net.activation = get_string(in);
    const auto n_dims = get<std::uint32_t>(in);
    if (n_dims < 2 || n_dims > (1u << 16)) throw std::runtime_error("model file corrupt: bad layer count");
    net.layer_dims.resize(n_dims);
    for (auto& d : net.layer_dims) {
        d = get<std::int32_t>(in);
        if (d < 1) throw std::runtime_error("model file corrupt: bad layer dimension");
    }
    for (std::size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
        Matrix w(net.layer_dims[l + 1], net.layer_dims[l]);
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = get<double>(in);
        net.weights.push_back(std::move(w));
        Vector b(net.layer_dims[l + 1]);
        for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = get<double>(in);
        net.biases.push_back(std::move(b));
    }
    return net;
}

}  // namespace

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::tsae: return "tsae";
        case ModelKind::ae_window: return "ae-w";
        case ModelKind::ae_instant: return "ae-i";
    }
    throw std::logic_error("unknown model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "tsae") return ModelKind::tsae;
    if (name == "ae-w") return ModelKind::ae_window;
    if (name == "ae-i") return ModelKind::ae_instant;
    throw std::invalid_argument("unknown model type '" + name + "' (expected tsae, ae-w or ae-i)");
}

void save_model(const std::string& path, const ModelBundle& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path);

    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kVersion);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(model.kind));
    put<std::int32_t>(out, model.window_len);
    put<std::int32_t>(out, model.signal_dim);
    put<std::int32_t>(out, model.decimation);

    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.column_names.size()));
    for (std::size_t j = 0; j < model.column_names.size(); ++j) {
        put_string(out, model.column_names[j]);
        put<double>(out, model.scaling.col_min(static_cast<long>(j)));
        put<double>(out, model.scaling.col_max(static_cast<long>(j)));
        put<std::uint8_t>(out, model.scaling.constant[j] ? 1 : 0);
    }
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.excluded.size()));
    for (const auto& name : model.excluded) put_string(out, name);

    put<std::uint8_t>(out, model.ae2.has_value() ? 2 : 1);
    put_net(out, model.ae1);
    if (model.ae2) put_net(out, *model.ae2);

    put<std::int32_t>(out, model.meta.epochs_ae1);
    put<std::int32_t>(out, model.meta.epochs_ae2);
    put<double>(out, model.meta.lr_ae1);
    put<double>(out, model.meta.lr_ae2);
    put<std::int32_t>(out, model.meta.batch_size);
    put<std::uint64_t>(out, model.meta.seed);
    put<double>(out, model.meta.final_train_loss_ae1);
    put<double>(out, model.meta.final_val_loss_ae1);
    put<double>(out, model.meta.final_train_loss_ae2);
    put<double>(out, model.meta.final_val_loss_ae2);
    put_string(out, model.meta.config_hash);
    if (!out) throw std::runtime_error("failed writing model file: " + path);
}

ModelBundle load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read model file: " + path);

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error(path + ": not a model file (bad magic)");
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion)
        throw std::runtime_error(path + ": unsupported model format version " +
                                 std::to_string(version));

    ModelBundle model;
    const auto kind = get<std::uint8_t>(in);
    if (kind > 2) throw std::runtime_error(path + ": corrupt model kind");
    model.kind = static_cast<ModelKind>(kind);
    model.window_len = get<std::int32_t>(in);
    model.signal_dim = get<std::int32_t>(in);
    model.decimation = get<std::int32_t>(in);
    if (model.window_len < 1 || model.signal_dim < 1 || model.decimation < 1)
        throw std::runtime_error(path + ": corrupt model header");

    const auto n_cols = get<std::uint32_t>(in);
    if (n_cols != static_cast<std::uint32_t>(model.signal_dim))
        throw std::runtime_error(path + ": column count does not match signal dimension");
    model.scaling.col_min.resize(n_cols);
    model.scaling.col_max.resize(n_cols);
    model.scaling.constant.resize(n_cols);
    for (std::uint32_t j = 0; j < n_cols; ++j) {
        model.column_names.push_back(get_string(in));
        model.scaling.col_min(j) = get<double>(in);
        model.scaling.col_max(j) = get<double>(in);
        model.scaling.constant[j] = get<std::uint8_t>(in) != 0;
    }
    const auto n_excluded = get<std::uint32_t>(in);
    if (n_excluded > (1u << 20)) throw std::runtime_error(path + ": corrupt exclusion list");
    for (std::uint32_t i = 0; i < n_excluded; ++i) model.excluded.push_back(get_string(in));

    const auto n_nets = get<std::uint8_t>(in);
    if (n_nets < 1 || n_nets > 2) throw std::runtime_error(path + ": corrupt net count");
    model.ae1 = get_net(in);
    if (n_nets == 2) model.ae2 = get_net(in);
    if (model.kind == ModelKind::tsae && !model.ae2)
        throw std::runtime_error(path + ": tsae model missing the residual autoencoder");
    if (model.ae1.input_dim() != model.window_len * model.signal_dim ||
        model.ae1.output_dim() != model.window_len * model.signal_dim)
        throw std::runtime_error(path + ": window net dimensions do not match K*m");
    if (model.ae2 && (model.ae2->input_dim() != model.signal_dim ||
                      model.ae2->output_dim() != model.signal_dim))
        throw std::runtime_error(path + ": residual net dimensions do not match m");

    model.meta.epochs_ae1 = get<std::int32_t>(in);
    model.meta.epochs_ae2 = get<std::int32_t>(in);
    model.meta.lr_ae1 = get<double>(in);
    model.meta.lr_ae2 = get<double>(in);
    model.meta.batch_size = get<std::int32_t>(in);
    model.meta.seed = get<std::uint64_t>(in);
    model.meta.final_train_loss_ae1 = get<double>(in);
    model.meta.final_val_loss_ae1 = get<double>(in);
    model.meta.final_train_loss_ae2 = get<double>(in);
    model.meta.final_val_loss_ae2 = get<double>(in);
    model.meta.config_hash = get_string(in);
    return model;
}

}  // namespace tsad
