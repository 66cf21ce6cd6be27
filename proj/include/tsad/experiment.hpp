#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tsad/baselines.hpp"
#include "tsad/evaluation.hpp"
#include "tsad/model_io.hpp"
#include "tsad/preprocessing.hpp"
#include "tsad/synthetic.hpp"
#include "tsad/tsae.hpp"

namespace tsad {

// Everything one experiment needs: a data source (CSV pair or synthetic
// spec, exactly one), preprocessing settings, the model choice, training
// hyper-parameters and the sweep grids.
struct ExperimentConfig {
    std::string train_csv;
    std::string test_csv;
    std::optional<SyntheticSpec> synthetic;

    std::vector<std::string> exclude;
    int decimation = 1;
    int window = 10;
    int step = 1;

    std::string model = "tsae";  // tsae | ae-w | ae-i
    int mid_layers = 1;
    TrainConfig train;

    std::vector<int> rate_grid{1, 5, 10, 20, 50};
    std::vector<int> window_grid{5, 10, 20, 50, 100};
    // (a, b) hidden-size ratios for AE1 and AE2.
    std::vector<std::pair<double, double>> node_grid{
        {0.25, 0.1}, {0.5, 0.1}, {0.75, 0.1}, {0.25, 0.2}, {0.5, 0.2}, {0.75, 0.2}};
    int n_repeats = 3;

    std::string out_dir = ".";
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig config_from_file(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// FNV-1a hash of the canonical config dump; stamped into models and
// reports so results are traceable to their configuration.
std::string config_hash(const ExperimentConfig& cfg);

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);
nlohmann::json synthetic_spec_to_json(const SyntheticSpec& spec);

// Raw data per the configured source. Synthetic sources generate from the
// spec seed, so the dataset is independent of the model seed.
TimeSeriesMatrix load_train_data(const ExperimentConfig& cfg);
TimeSeriesMatrix load_test_data(const ExperimentConfig& cfg);

// exclude -> fit/apply scaling -> decimate -> window -> (split inside
// training); returns the trained model with its preprocessing state.
ModelBundle train_model(const TimeSeriesMatrix& raw_train, const ExperimentConfig& cfg,
                        TrainingLog* log = nullptr);

struct DetectionResult {
    std::vector<long> t;         // instant index in the decimated test series
    std::vector<double> scores;
    std::vector<int> labels;     // predictions at `threshold`
    std::vector<int> truth;      // aligned ground truth (empty if unlabeled)
    double threshold = 0.0;
    std::optional<EvalReport> report;  // present when truth is available
};

// Applies the model's saved preprocessing to raw test data and scores
// every window. A missing `threshold` means best-F1 sweep, which requires
// labeled data.
DetectionResult detect_with_model(const ModelBundle& model, const TimeSeriesMatrix& raw_test,
                                  std::optional<double> threshold);

// Scores per the bundle's kind (tsae, ae-w or ae-i scoring).
std::vector<double> score_bundle(const ModelBundle& model, const WindowSeries& windows);

struct SweepRow {
    std::string param;
    double value = 0.0;
    std::uint64_t seed = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;        // one per (value, seed)
    std::vector<SweepRow> summary;     // one per value, metrics averaged
};

// Trains and evaluates one model per grid point, n_repeats seeds each
// (seed schedule: base seed + repeat index).
SweepResult run_sweep(const ExperimentConfig& cfg, const std::string& param);

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows,
                     bool with_seed);

// Model card emitted by the report command.
nlohmann::json model_summary(const ModelBundle& model);

// Stage-one outputs over preprocessed data; drives the correlation
// separation export.
StageOneOutputs bundle_stage_one(const ModelBundle& model, const TimeSeriesMatrix& raw);

}  // namespace tsad
