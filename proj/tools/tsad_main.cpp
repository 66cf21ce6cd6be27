// tsad: train, score and evaluate two-stage autoencoder anomaly detectors
// on multivariate time series, plus a synthetic plant-signal generator and
// parameter sweeps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsad/csv_io.hpp"
#include "tsad/evaluation.hpp"
#include "tsad/experiment.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
    std::optional<std::string> train_csv, test_csv, model, out_dir;
    std::optional<int> decimation, window, mid_layers, epochs_ae1, epochs_ae2, batch_size;
    std::optional<double> lr_ae1, lr_ae2;
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<std::string>> exclude;
    std::optional<int> n_repeats;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--train-csv", ov.train_csv, "Training data CSV (overrides config)");
    cmd->add_option("--test-csv", ov.test_csv, "Test data CSV (overrides config)");
    cmd->add_option("--model", ov.model, "Model type: tsae, ae-w or ae-i");
    cmd->add_option("-q,--decimation", ov.decimation, "Down-sampling rate q");
    cmd->add_option("-K,--window", ov.window, "Window length K");
    cmd->add_option("--mid-layers", ov.mid_layers, "Baseline intermediate layers (1, 3 or 5)");
    cmd->add_option("--epochs-ae1", ov.epochs_ae1, "Stage-1 training epochs");
    cmd->add_option("--epochs-ae2", ov.epochs_ae2, "Stage-2 training epochs");
    cmd->add_option("--lr-ae1", ov.lr_ae1, "Stage-1 learning rate");
    cmd->add_option("--lr-ae2", ov.lr_ae2, "Stage-2 learning rate");
    cmd->add_option("--batch-size", ov.batch_size, "Minibatch size");
    cmd->add_option("--seed", ov.seed, "Experiment seed");
    cmd->add_option("--exclude", ov.exclude, "Signals to exclude")->delimiter(',');
    cmd->add_option("--repeats", ov.n_repeats, "Seeds per sweep grid point");
    cmd->add_option("-o,--out", ov.out_dir, "Output directory");
}

tsad::ExperimentConfig apply_overrides(tsad::ExperimentConfig cfg, const Overrides& ov) {
    if (ov.train_csv) { cfg.train_csv = *ov.train_csv; cfg.synthetic.reset(); }
    if (ov.test_csv) cfg.test_csv = *ov.test_csv;
    if (ov.model) cfg.model = *ov.model;
    if (ov.decimation) cfg.decimation = *ov.decimation;
    if (ov.window) cfg.window = *ov.window;
    if (ov.mid_layers) cfg.mid_layers = *ov.mid_layers;
    if (ov.epochs_ae1) cfg.train.epochs_ae1 = *ov.epochs_ae1;
    if (ov.epochs_ae2) cfg.train.epochs_ae2 = *ov.epochs_ae2;
    if (ov.lr_ae1) cfg.train.lr_ae1 = *ov.lr_ae1;
    if (ov.lr_ae2) cfg.train.lr_ae2 = *ov.lr_ae2;
    if (ov.batch_size) cfg.train.batch_size = *ov.batch_size;
    if (ov.seed) cfg.train.seed = *ov.seed;
    if (ov.exclude) cfg.exclude = *ov.exclude;
    if (ov.n_repeats) cfg.n_repeats = *ov.n_repeats;
    if (ov.out_dir) cfg.out_dir = *ov.out_dir;
    // Re-validate through the JSON round trip.
    return tsad::config_from_json(tsad::config_to_json(cfg));
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << text << "\n";
}

void write_training_log(const fs::path& path, const tsad::TrainingLog& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << "stage,epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < log.ae1.size(); ++e)
        out << "ae1," << e + 1 << "," << tsad::format_double(log.ae1[e].train) << ","
            << tsad::format_double(log.ae1[e].val) << "\n";
    for (std::size_t e = 0; e < log.ae2.size(); ++e)
        out << "ae2," << e + 1 << "," << tsad::format_double(log.ae2[e].train) << ","
            << tsad::format_double(log.ae2[e].val) << "\n";
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed) {
    std::ifstream in(spec_path);
    if (!in) throw std::runtime_error("cannot read spec file: " + spec_path);
    nlohmann::json j;
    in >> j;
    tsad::SyntheticSpec spec = tsad::synthetic_spec_from_json(j);
    if (seed) spec.seed = *seed;

    const tsad::SyntheticData data = tsad::generate(spec);
    fs::create_directories(out_dir);
    tsad::write_time_series_csv((fs::path(out_dir) / "train.csv").string(), data.train);
    tsad::write_time_series_csv((fs::path(out_dir) / "test.csv").string(), data.test);
    write_text(fs::path(out_dir) / "synth_spec.json", tsad::synthetic_spec_to_json(spec).dump(2));
    std::cout << "wrote " << (fs::path(out_dir) / "train.csv").string() << " ("
              << data.train.rows() << " rows) and test.csv (" << data.test.rows()
              << " rows, " << tsad::segments_from_labels(data.test.labels).size()
              << " anomaly segments)\n";
    return 0;
}

int cmd_train(const tsad::ExperimentConfig& cfg) {
    const tsad::TimeSeriesMatrix raw = tsad::load_train_data(cfg);
    tsad::TrainingLog log;
    const tsad::ModelBundle model = tsad::train_model(raw, cfg, &log);

    fs::create_directories(cfg.out_dir);
    const fs::path model_path = fs::path(cfg.out_dir) / "model.tsad";
    tsad::save_model(model_path.string(), model);
    write_training_log(fs::path(cfg.out_dir) / "training_log.csv", log);
    nlohmann::json echo = tsad::config_to_json(cfg);
    echo["config_hash"] = model.meta.config_hash;
    write_text(fs::path(cfg.out_dir) / "train_config.json", echo.dump(2));

    std::cout << "trained " << cfg.model << " model (K=" << model.window_len
              << ", m=" << model.signal_dim << ", q=" << model.decimation
              << ") -> " << model_path.string() << "\n"
              << "final losses: ae1 train " << model.meta.final_train_loss_ae1 << " val "
              << model.meta.final_val_loss_ae1;
    if (model.ae2)
        std::cout << ", ae2 train " << model.meta.final_train_loss_ae2 << " val "
                  << model.meta.final_val_loss_ae2;
    std::cout << "\nconfig hash " << model.meta.config_hash << "\n";
    return 0;
}

int cmd_detect(const std::string& model_path, const std::string& test_path,
               const std::string& threshold_arg, const std::string& out_dir) {
    const tsad::ModelBundle model = tsad::load_model(model_path);
    const tsad::TimeSeriesMatrix test = tsad::read_time_series_csv(test_path);

    std::optional<double> threshold;
    if (threshold_arg != "sweep") threshold = std::stod(threshold_arg);
    const tsad::DetectionResult det = tsad::detect_with_model(model, test, threshold);

    fs::create_directories(out_dir);
    tsad::ScoreRows rows{det.t, det.scores, det.labels};
    tsad::write_scores_csv((fs::path(out_dir) / "scores.csv").string(), rows);
    if (!det.truth.empty())
        tsad::write_truth_csv((fs::path(out_dir) / "truth.csv").string(), det.t, det.truth);

    std::cout << "scored " << det.scores.size() << " windows at threshold "
              << tsad::format_double(det.threshold)
              << (threshold ? "" : " (best-F1 sweep)") << "\n";
    if (det.report)
        std::cout << "point-adjusted P=" << det.report->precision << " R=" << det.report->recall
                  << " F1=" << det.report->f1 << "\n";
    return 0;
}

int cmd_eval(const std::string& scores_path, const std::string& truth_path,
             const std::string& threshold_arg, const std::string& out_path,
             const std::string& curve_path) {
    const tsad::ScoreRows rows = tsad::read_scores_csv(scores_path);
    const auto [truth_t, truth_labels] = tsad::read_truth_csv(truth_path);
    if (truth_t != rows.t)
        throw std::runtime_error("scores and truth files cover different instants");

    tsad::EvalReport report;
    std::vector<tsad::SweepPoint> curve;
    if (threshold_arg == "sweep") {
        report = tsad::best_f1_sweep(rows.score, truth_labels,
                                     curve_path.empty() ? nullptr : &curve);
    } else {
        report = tsad::evaluate_at(rows.score, truth_labels, std::stod(threshold_arg));
    }

    const std::string json = tsad::eval_report_json(report);
    if (out_path.empty()) {
        std::cout << json << "\n";
    } else {
        write_text(out_path, json);
        std::cout << "wrote " << out_path << "\n";
    }
    if (!curve_path.empty()) {
        std::ofstream out(curve_path);
        if (!out) throw std::runtime_error("cannot write file: " + curve_path);
        out << "threshold,precision,recall,f1\n";
        for (const tsad::SweepPoint& p : curve)
            out << tsad::format_double(p.threshold) << "," << tsad::format_double(p.precision)
                << "," << tsad::format_double(p.recall) << "," << tsad::format_double(p.f1)
                << "\n";
        std::cout << "wrote " << curve_path << "\n";
    }
    std::cout << "P=" << report.precision << " R=" << report.recall << " F1=" << report.f1
              << " at threshold " << tsad::format_double(report.threshold) << "\n";
    return 0;
}

int cmd_sweep(const tsad::ExperimentConfig& cfg, const std::string& param) {
    const tsad::SweepResult result = tsad::run_sweep(cfg, param);
    fs::create_directories(cfg.out_dir);
    const fs::path detail = fs::path(cfg.out_dir) / ("sweep_" + param + "_results.csv");
    const fs::path summary = fs::path(cfg.out_dir) / ("sweep_" + param + "_summary.csv");
    tsad::write_sweep_csv(detail.string(), result.rows, true);
    tsad::write_sweep_csv(summary.string(), result.summary, false);
    std::cout << "swept " << param << " over " << result.summary.size() << " grid points, "
              << cfg.n_repeats << " seed(s) each\n";
    for (const tsad::SweepRow& r : result.summary)
        std::cout << "  " << r.param << "=" << tsad::format_double(r.value)
                  << "  P=" << r.precision << " R=" << r.recall << " F1=" << r.f1 << "\n";
    std::cout << "wrote " << detail.string() << " and " << summary.string() << "\n";
    return 0;
}

int cmd_report(const std::string& model_path, const std::string& data_path,
               const std::string& out_dir) {
    const tsad::ModelBundle model = tsad::load_model(model_path);
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "model_summary.json", tsad::model_summary(model).dump(2));
    std::cout << "wrote " << (fs::path(out_dir) / "model_summary.json").string() << "\n";

    if (!data_path.empty()) {
        const tsad::TimeSeriesMatrix raw = tsad::read_time_series_csv(data_path);
        const tsad::StageOneOutputs s1 = tsad::bundle_stage_one(model, raw);
        const tsad::CorrelationSeparation sep =
            tsad::correlation_separation_check(s1.x_prime, s1.dx);
        std::vector<std::string> rows, cols;
        for (const std::string& name : model.column_names) {
            rows.push_back("xprime:" + name);
            cols.push_back("dx:" + name);
        }
        const fs::path rho_path = fs::path(out_dir) / "correlation_separation.csv";
        tsad::write_matrix_csv(rho_path.string(), sep.rho, rows, cols);
        std::cout << "wrote " << rho_path.string() << " (max |rho| "
                  << tsad::format_double(sep.max_abs) << ", mean |rho| "
                  << tsad::format_double(sep.mean_abs) << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-stage autoencoder anomaly detection for multivariate time series"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate synthetic plant-like train/test CSVs");
    std::string synth_spec, synth_out = ".";
    std::optional<std::uint64_t> synth_seed;
    synth->add_option("--spec", synth_spec, "Synthetic spec JSON")->required();
    synth->add_option("-o,--out", synth_out, "Output directory");
    synth->add_option("--seed", synth_seed, "Override the spec seed");

    // train
    auto* train = app.add_subcommand("train", "Train a model from a config file");
    std::string train_config;
    Overrides train_ov;
    train->add_option("-c,--config", train_config, "Experiment config JSON")->required();
    add_override_flags(train, train_ov);

    // detect
    auto* detect = app.add_subcommand("detect", "Score test data with a trained model");
    std::string det_model, det_test, det_threshold = "sweep", det_out = ".";
    detect->add_option("--model", det_model, "Model file")->required();
    detect->add_option("--test", det_test, "Test data CSV")->required();
    detect->add_option("--threshold", det_threshold,
                       "Numeric threshold, or 'sweep' for best-F1 selection");
    detect->add_option("-o,--out", det_out, "Output directory");

    // eval
    auto* eval = app.add_subcommand("eval", "Point-adjusted metrics for a score file");
    std::string eval_scores, eval_truth, eval_threshold = "sweep", eval_out, eval_curve;
    eval->add_option("--scores", eval_scores, "scores.csv from detect")->required();
    eval->add_option("--truth", eval_truth, "truth.csv aligned with the scores")->required();
    eval->add_option("--threshold", eval_threshold, "Numeric threshold or 'sweep'");
    eval->add_option("-o,--out", eval_out, "Report JSON path (stdout if omitted)");
    eval->add_option("--curve", eval_curve, "Optional sweep-curve CSV path");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Parameter sweep (rate, window or nodes)");
    std::string sweep_config, sweep_param;
    Overrides sweep_ov;
    sweep->add_option("-c,--config", sweep_config, "Experiment config JSON")->required();
    sweep->add_option("--param", sweep_param, "rate | window | nodes")->required();
    add_override_flags(sweep, sweep_ov);

    // report
    auto* report = app.add_subcommand("report", "Model summary and correlation exports");
    std::string rep_model, rep_data, rep_out = ".";
    report->add_option("--model", rep_model, "Model file")->required();
    report->add_option("--data", rep_data,
                       "Optional data CSV for the correlation-separation export");
    report->add_option("-o,--out", rep_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(synth_spec, synth_out, synth_seed);
        if (train->parsed())
            return cmd_train(apply_overrides(tsad::config_from_file(train_config), train_ov));
        if (detect->parsed()) return cmd_detect(det_model, det_test, det_threshold, det_out);
        if (eval->parsed())
            return cmd_eval(eval_scores, eval_truth, eval_threshold, eval_out, eval_curve);
        if (sweep->parsed())
            return cmd_sweep(apply_overrides(tsad::config_from_file(sweep_config), sweep_ov),
                             sweep_param);
        if (report->parsed()) return cmd_report(rep_model, rep_data, rep_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
