#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsad/dense_net.hpp"
#include "tsad/preprocessing.hpp"

namespace tsad {

enum class ModelKind : std::uint8_t { tsae = 0, ae_window = 1, ae_instant = 2 };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct TrainMeta {
    int epochs_ae1 = 0;
    int epochs_ae2 = 0;
    double lr_ae1 = 0.0;
    double lr_ae2 = 0.0;
    int batch_size = 0;
    std::uint64_t seed = 0;
    double final_train_loss_ae1 = 0.0;
    double final_val_loss_ae1 = 0.0;
    double final_train_loss_ae2 = 0.0;
    double final_val_loss_ae2 = 0.0;
    std::string config_hash;
};

// Everything a detection run needs: the network(s) plus the exact
// preprocessing state fitted at training time. Applying saved scaling to
// test data is therefore the only possible code path.
struct ModelBundle {
    ModelKind kind = ModelKind::tsae;
    int window_len = 0;
    int signal_dim = 0;  // m, after exclusion
    int decimation = 1;  // q used at training time
    std::vector<std::string> column_names;
    std::vector<std::string> excluded;
    ScalingParams scaling;
    DenseNet ae1;                  // the window autoencoder (or the baseline net)
    std::optional<DenseNet> ae2;   // residual autoencoder; tsae only
    TrainMeta meta;
};

// Binary container, little-endian, versioned. Round-trips bit-exactly.
void save_model(const std::string& path, const ModelBundle& model);
ModelBundle load_model(const std::string& path);

}  // namespace tsad
