#include "tsad/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "tsad/csv_io.hpp"

namespace tsad {

namespace {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
    SyntheticSpec spec;
    read_field(j, "m", spec.m);
    read_field(j, "train_len", spec.train_len);
    read_field(j, "test_len", spec.test_len);
    read_field(j, "n_long", spec.n_long);
    read_field(j, "n_short", spec.n_short);
    read_field(j, "amplitude_ratio", spec.amplitude_ratio);
    read_field(j, "noise_level", spec.noise_level);
    read_field(j, "min_signals_per_short", spec.min_signals_per_short);
    read_field(j, "max_signals_per_short", spec.max_signals_per_short);
    read_field(j, "seed", spec.seed);
    if (j.contains("long_driver")) {
        const std::string kind = j.at("long_driver").get<std::string>();
        if (kind == "smoothed_walk") spec.long_driver = LongDriverKind::smoothed_walk;
        else if (kind == "sinusoid") spec.long_driver = LongDriverKind::sinusoid;
        else throw std::invalid_argument("long_driver must be smoothed_walk or sinusoid");
    }
    if (j.contains("anomalies")) {
        for (const auto& a : j.at("anomalies")) {
            AnomalyEvent e;
            e.type = anomaly_type_from_name(a.at("type").get<std::string>());
            e.signals = a.at("signals").get<std::vector<int>>();
            e.start = a.at("start").get<long>();
            e.duration = a.at("duration").get<long>();
            read_field(a, "magnitude", e.magnitude);
            spec.anomalies.push_back(std::move(e));
        }
    }
    return spec;
}

nlohmann::json synthetic_spec_to_json(const SyntheticSpec& spec) {
    nlohmann::json j;
    j["m"] = spec.m;
    j["train_len"] = spec.train_len;
    j["test_len"] = spec.test_len;
    j["n_long"] = spec.n_long;
    j["n_short"] = spec.n_short;
    j["amplitude_ratio"] = spec.amplitude_ratio;
    j["noise_level"] = spec.noise_level;
    j["long_driver"] =
        spec.long_driver == LongDriverKind::smoothed_walk ? "smoothed_walk" : "sinusoid";
    j["min_signals_per_short"] = spec.min_signals_per_short;
    j["max_signals_per_short"] = spec.max_signals_per_short;
    j["seed"] = spec.seed;
    j["anomalies"] = nlohmann::json::array();
    for (const AnomalyEvent& e : spec.anomalies) {
        nlohmann::json a;
        a["type"] = anomaly_type_name(e.type);
        a["signals"] = e.signals;
        a["start"] = e.start;
        a["duration"] = e.duration;
        a["magnitude"] = e.magnitude;
        j["anomalies"].push_back(a);
    }
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (j.contains("data")) {
        const auto& d = j.at("data");
        read_field(d, "train_csv", cfg.train_csv);
        read_field(d, "test_csv", cfg.test_csv);
        if (d.contains("synthetic")) cfg.synthetic = synthetic_spec_from_json(d.at("synthetic"));
    }
    read_field(j, "exclude", cfg.exclude);
    read_field(j, "decimation", cfg.decimation);
    read_field(j, "window", cfg.window);
    read_field(j, "step", cfg.step);
    read_field(j, "model", cfg.model);
    read_field(j, "mid_layers", cfg.mid_layers);
    if (j.contains("train")) {
        const auto& t = j.at("train");
        read_field(t, "epochs_ae1", cfg.train.epochs_ae1);
        read_field(t, "epochs_ae2", cfg.train.epochs_ae2);
        read_field(t, "lr_ae1", cfg.train.lr_ae1);
        read_field(t, "lr_ae2", cfg.train.lr_ae2);
        read_field(t, "batch_size", cfg.train.batch_size);
        read_field(t, "seed", cfg.train.seed);
        read_field(t, "ae1_hidden", cfg.train.ae1_hidden);
        read_field(t, "ae1_hidden_ratio", cfg.train.ae1_hidden_ratio);
        read_field(t, "ae2_hidden_ratio", cfg.train.ae2_hidden_ratio);
        read_field(t, "early_stop", cfg.train.early_stop);
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        read_field(s, "rates", cfg.rate_grid);
        read_field(s, "windows", cfg.window_grid);
        read_field(s, "n_repeats", cfg.n_repeats);
        if (s.contains("nodes")) {
            cfg.node_grid.clear();
            for (const auto& p : s.at("nodes"))
                cfg.node_grid.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        }
    }
    read_field(j, "out_dir", cfg.out_dir);

    const bool has_files = !cfg.train_csv.empty();
    if (has_files == cfg.synthetic.has_value())
        throw std::invalid_argument("config: exactly one data source (files or synthetic) required");
    model_kind_from_name(cfg.model);
    if (cfg.decimation < 1 || cfg.window < 1 || cfg.step < 1)
        throw std::invalid_argument("config: decimation, window and step must be positive");
    if (cfg.n_repeats < 1) throw std::invalid_argument("config: n_repeats must be positive");
    for (int v : cfg.rate_grid)
        if (v < 1) throw std::invalid_argument("config: sweep rates must be positive");
    for (int v : cfg.window_grid)
        if (v < 1) throw std::invalid_argument("config: sweep windows must be positive");
    for (const auto& [a, b] : cfg.node_grid)
        if (a <= 0.0 || b <= 0.0)
            throw std::invalid_argument("config: node ratios must be positive");
    return cfg;
}

ExperimentConfig config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    if (cfg.synthetic) {
        j["data"]["synthetic"] = synthetic_spec_to_json(*cfg.synthetic);
    } else {
        j["data"]["train_csv"] = cfg.train_csv;
        if (!cfg.test_csv.empty()) j["data"]["test_csv"] = cfg.test_csv;
    }
    j["exclude"] = cfg.exclude;
    j["decimation"] = cfg.decimation;
    j["window"] = cfg.window;
    j["step"] = cfg.step;
    j["model"] = cfg.model;
    j["mid_layers"] = cfg.mid_layers;
    j["train"] = {{"epochs_ae1", cfg.train.epochs_ae1},
                  {"epochs_ae2", cfg.train.epochs_ae2},
                  {"lr_ae1", cfg.train.lr_ae1},
                  {"lr_ae2", cfg.train.lr_ae2},
                  {"batch_size", cfg.train.batch_size},
                  {"seed", cfg.train.seed},
                  {"ae1_hidden", cfg.train.ae1_hidden},
                  {"ae1_hidden_ratio", cfg.train.ae1_hidden_ratio},
                  {"ae2_hidden_ratio", cfg.train.ae2_hidden_ratio},
                  {"early_stop", cfg.train.early_stop}};
    j["sweep"] = {{"rates", cfg.rate_grid},
                  {"windows", cfg.window_grid},
                  {"n_repeats", cfg.n_repeats}};
    j["sweep"]["nodes"] = nlohmann::json::array();
    for (const auto& [a, b] : cfg.node_grid)
        j["sweep"]["nodes"].push_back(nlohmann::json::array({a, b}));
    j["out_dir"] = cfg.out_dir;
    return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string dump = config_to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TimeSeriesMatrix load_train_data(const ExperimentConfig& cfg) {
    if (cfg.synthetic) return generate(*cfg.synthetic).train;
    return read_time_series_csv(cfg.train_csv);
}

TimeSeriesMatrix load_test_data(const ExperimentConfig& cfg) {
    if (cfg.synthetic) return generate(*cfg.synthetic).test;
    if (cfg.test_csv.empty()) throw std::invalid_argument("config: no test data configured");
    return read_time_series_csv(cfg.test_csv);
}

ModelBundle train_model(const TimeSeriesMatrix& raw_train, const ExperimentConfig& cfg,
                        TrainingLog* log) {
    const TimeSeriesMatrix kept = exclude_signals(raw_train, cfg.exclude);
    const ScalingParams scaling = fit_minmax(kept);
    const TimeSeriesMatrix scaled = apply_minmax(scaling, kept);
    const TimeSeriesMatrix reduced = decimate(scaled, cfg.decimation);
    const WindowSeries windows = make_windows(reduced, cfg.window, cfg.step);

    ModelBundle bundle;
    bundle.kind = model_kind_from_name(cfg.model);
    bundle.window_len = cfg.window;
    bundle.signal_dim = static_cast<int>(kept.cols());
    bundle.decimation = cfg.decimation;
    bundle.column_names = kept.column_names;
    bundle.excluded = cfg.exclude;
    bundle.scaling = scaling;

    if (bundle.kind == ModelKind::tsae) {
        TSAEModel model = train_tsae(windows, cfg.train, log);
        bundle.ae1 = std::move(model.ae1);
        bundle.ae2 = std::move(model.ae2);
        bundle.meta.final_train_loss_ae1 = model.final_train_loss_ae1;
        bundle.meta.final_val_loss_ae1 = model.final_val_loss_ae1;
        bundle.meta.final_train_loss_ae2 = model.final_train_loss_ae2;
        bundle.meta.final_val_loss_ae2 = model.final_val_loss_ae2;
    } else {
        std::vector<EpochLosses> losses;
        BaselineAE ae = train_ae(windows, cfg.train, cfg.mid_layers, &losses);
        bundle.ae1 = std::move(ae.net);
        bundle.meta.final_train_loss_ae1 = ae.final_train_loss;
        bundle.meta.final_val_loss_ae1 = ae.final_val_loss;
        if (log != nullptr) log->ae1 = losses;
    }
    bundle.meta.epochs_ae1 = cfg.train.epochs_ae1;
    bundle.meta.epochs_ae2 = bundle.kind == ModelKind::tsae ? cfg.train.epochs_ae2 : 0;
    bundle.meta.lr_ae1 = cfg.train.lr_ae1;
    bundle.meta.lr_ae2 = cfg.train.lr_ae2;
    bundle.meta.batch_size = cfg.train.batch_size;
    bundle.meta.seed = cfg.train.seed;
    bundle.meta.config_hash = config_hash(cfg);
    return bundle;
}

namespace {

// Reorders raw test columns to the model's training layout (exclusion list
// applied first); unknown layouts are an error, not a silent mismatch.
TimeSeriesMatrix align_test_columns(const ModelBundle& model, const TimeSeriesMatrix& raw) {
    std::vector<std::string> to_drop;
    for (const std::string& name : model.excluded)
        if (std::find(raw.column_names.begin(), raw.column_names.end(), name) !=
            raw.column_names.end())
            to_drop.push_back(name);
    const TimeSeriesMatrix kept = exclude_signals(raw, to_drop);

    if (kept.cols() != model.signal_dim)
        throw std::runtime_error("test data has " + std::to_string(kept.cols()) +
                                 " signals after exclusion, model expects " +
                                 std::to_string(model.signal_dim));
    if (kept.column_names == model.column_names) return kept;

    std::unordered_map<std::string, long> position;
    for (long j = 0; j < kept.cols(); ++j) position[kept.column_names[j]] = j;
    TimeSeriesMatrix reordered = kept;
    for (long j = 0; j < model.signal_dim; ++j) {
        const auto it = position.find(model.column_names[j]);
        if (it == position.end())
            throw std::runtime_error("test data is missing column '" + model.column_names[j] + "'");
        reordered.values.col(j) = kept.values.col(it->second);
        reordered.column_names[j] = model.column_names[j];
    }
    return reordered;
}

}  // namespace

std::vector<double> score_bundle(const ModelBundle& model, const WindowSeries& windows) {
    if (model.kind == ModelKind::tsae) {
        TSAEModel tsae;
        tsae.ae1 = model.ae1;
        tsae.ae2 = *model.ae2;
        tsae.window_len = model.window_len;
        tsae.signal_dim = model.signal_dim;
        return score_windows(tsae, windows);
    }
    BaselineAE ae;
    ae.net = model.ae1;
    ae.window_len = model.window_len;
    ae.signal_dim = model.signal_dim;
    return score_windows(ae, windows,
                         model.kind == ModelKind::ae_window ? BaselineScoring::window
                                                            : BaselineScoring::instant);
}

DetectionResult detect_with_model(const ModelBundle& model, const TimeSeriesMatrix& raw_test,
                                  std::optional<double> threshold) {
    const TimeSeriesMatrix aligned = align_test_columns(model, raw_test);
    const TimeSeriesMatrix scaled = apply_minmax(model.scaling, aligned);
    const TimeSeriesMatrix reduced = decimate(scaled, model.decimation);
    const WindowSeries windows = make_windows(reduced, model.window_len, 1);

    DetectionResult result;
    result.scores = score_bundle(model, windows);
    result.t.reserve(windows.count());
    for (int i = 0; i < windows.count(); ++i) result.t.push_back(windows.instant(i));
    if (windows.has_labels()) {
        result.truth.reserve(windows.count());
        for (int i = 0; i < windows.count(); ++i) result.truth.push_back(windows.label(i));
    }

    if (threshold) {
        result.threshold = *threshold;
        if (!result.truth.empty())
            result.report = evaluate_at(result.scores, result.truth, *threshold);
    } else {
        if (result.truth.empty())
            throw std::invalid_argument(
                "threshold sweep requires a labeled test set; pass an explicit threshold");
        result.report = best_f1_sweep(result.scores, result.truth);
        result.threshold = result.report->threshold;
    }
    result.labels = detect(result.scores, result.threshold);
    return result;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const std::string& param) {
    std::vector<double> values;
    if (param == "rate") {
        for (int v : cfg.rate_grid) values.push_back(v);
    } else if (param == "window") {
        for (int v : cfg.window_grid) values.push_back(v);
    } else if (param == "nodes") {
        for (std::size_t i = 0; i < cfg.node_grid.size(); ++i) values.push_back(i);
    } else {
        throw std::invalid_argument("sweep param must be rate, window or nodes");
    }
    if (values.empty()) throw std::invalid_argument("sweep grid is empty");

    const TimeSeriesMatrix raw_train = load_train_data(cfg);
    const TimeSeriesMatrix raw_test = load_test_data(cfg);

    SweepResult result;
    for (double value : values) {
        ExperimentConfig point = cfg;
        std::string label = param;
        double reported = value;
        if (param == "rate") {
            point.decimation = static_cast<int>(value);
        } else if (param == "window") {
            point.window = static_cast<int>(value);
        } else {
            const auto& [a, b] = cfg.node_grid[static_cast<std::size_t>(value)];
            point.train.ae1_hidden_ratio = a;
            point.train.ae2_hidden_ratio = b;
            point.train.ae1_hidden.clear();
            reported = a;  // rows carry the AE1 ratio; the pair is in the label
            label = "nodes(a=" + format_double(a) + ",b=" + format_double(b) + ")";
        }

        double sum_p = 0.0, sum_r = 0.0, sum_f1 = 0.0;
        for (int rep = 0; rep < cfg.n_repeats; ++rep) {
            point.train.seed = cfg.train.seed + static_cast<std::uint64_t>(rep);
            const ModelBundle model = train_model(raw_train, point);
            const DetectionResult det = detect_with_model(model, raw_test, std::nullopt);
            SweepRow row;
            row.param = label;
            row.value = reported;
            row.seed = point.train.seed;
            row.precision = det.report->precision;
            row.recall = det.report->recall;
            row.f1 = det.report->f1;
            result.rows.push_back(row);
            sum_p += row.precision;
            sum_r += row.recall;
            sum_f1 += row.f1;
        }
        SweepRow mean;
        mean.param = label;
        mean.value = reported;
        mean.seed = 0;
        mean.precision = sum_p / cfg.n_repeats;
        mean.recall = sum_r / cfg.n_repeats;
        mean.f1 = sum_f1 / cfg.n_repeats;
        result.summary.push_back(mean);
    }
    return result;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows,
                     bool with_seed) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << (with_seed ? "param,value,seed,precision,recall,f1\n"
                      : "param,value,precision,recall,f1\n");
    for (const SweepRow& r : rows) {
        out << r.param << "," << format_double(r.value) << ",";
        if (with_seed) out << r.seed << ",";
        out << format_double(r.precision) << "," << format_double(r.recall) << ","
            << format_double(r.f1) << "\n";
    }
}

nlohmann::json model_summary(const ModelBundle& model) {
    nlohmann::json j;
    j["kind"] = model_kind_name(model.kind);
    j["window"] = model.window_len;
    j["signals"] = model.signal_dim;
    j["decimation"] = model.decimation;
    j["excluded"] = model.excluded;
    j["config_hash"] = model.meta.config_hash;

    auto net_json = [](const DenseNet& net) {
        const ParamCount pc = count_params(net.layer_dims);
        nlohmann::json n;
        n["layer_dims"] = net.layer_dims;
        n["activation"] = net.activation;
        n["nodes"] = pc.nodes;
        n["edges"] = pc.edges;
        return n;
    };
    j["ae1"] = net_json(model.ae1);
    if (model.ae2) j["ae2"] = net_json(*model.ae2);

    j["training"] = {{"epochs_ae1", model.meta.epochs_ae1},
                     {"epochs_ae2", model.meta.epochs_ae2},
                     {"lr_ae1", model.meta.lr_ae1},
                     {"lr_ae2", model.meta.lr_ae2},
                     {"batch_size", model.meta.batch_size},
                     {"seed", model.meta.seed},
                     {"final_train_loss_ae1", model.meta.final_train_loss_ae1},
                     {"final_val_loss_ae1", model.meta.final_val_loss_ae1},
                     {"final_train_loss_ae2", model.meta.final_train_loss_ae2},
                     {"final_val_loss_ae2", model.meta.final_val_loss_ae2}};
    return j;
}

StageOneOutputs bundle_stage_one(const ModelBundle& model, const TimeSeriesMatrix& raw) {
    const TimeSeriesMatrix aligned = align_test_columns(model, raw);
    const TimeSeriesMatrix scaled = apply_minmax(model.scaling, aligned);
    const TimeSeriesMatrix reduced = decimate(scaled, model.decimation);
    const WindowSeries windows = make_windows(reduced, model.window_len, 1);
    return stage_one_outputs(model.ae1, windows.flatten_all(), model.window_len,
                             model.signal_dim);
}

}  // namespace tsad
