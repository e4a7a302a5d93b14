#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "deljet/config.hpp"
#include "deljet/gradcheck.hpp"
#include "deljet/io.hpp"

namespace fs = std::filesystem;
using namespace deljet;

// Exit codes: 0 success, 1 check failure, 2 usage, 3 data/config error,
// 4 internal error.
namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

void write_text(const fs::path& path, const std::string& text) {
    io::atomic_write(path, [&](std::ostream& os) { os << text; });
}

int cmd_synth(const RunConfig& cfg, const std::string& out_path) {
    if (cfg.synth.length < 1) throw ConfigError("synth length must be >= 1");
    TimeSeries ts = synth_generate(cfg.synth);
    write_csv(ts, out_path);
    std::cout << "wrote " << ts.size() << " records to " << out_path << "\n";
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.output_dir);

    TimeSeries data = cfg.load_series();
    LagDataset lag = build_lag_matrix(data, cfg.lag_spec);
    ChronoSplit split = chrono_split(lag, cfg.fractions);
    MinMaxScaler scaler = fit_scaler(split.train);
    LagDataset train_s = apply_scaler(scaler, split.train);
    LagDataset val_s = apply_scaler(scaler, split.val);

    std::cerr << "training pipeline (seed " << cfg.base_seed << ", "
              << split.train.size() << " train rows)\n";
    JetPipeline pipe = fit_pipeline(train_s, val_s, cfg.jet, cfg.base_seed, scaler);

    fs::path pipe_path = fs::path(cfg.output_dir) / "pipeline.bin";
    pipe.save(pipe_path);

    // Per-stage validation metrics.
    std::ostringstream log;
    log << "config_echo:\n" << cfg.serialize() << "\n";
    auto stage_stats = [&](const std::string& name, std::vector<double> scaled_pred) {
        PredictionSeries p{split.val.y, invert_target(scaler, std::move(scaled_pred))};
        ErrorStats e = error_stats(p);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "val %-6s rmse=%.6f mae=%.6f sde=%.6f\n",
                      name.c_str(), e.rmse, e.mae, e.sde);
        log << buf;
    };
    stage_stats("wing1", pipe.wing1.predict(val_s));
    stage_stats("wing2", pipe.wing2.predict(val_s));
    stage_stats("tail", pipe.tail.predict(val_s.X));
    {
        // Full-pipeline prediction is already in physical units.
        PredictionSeries p{split.val.y, predict(pipe, split.val)};
        ErrorStats e = error_stats(p);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "val %-6s rmse=%.6f mae=%.6f sde=%.6f\n",
                      "nose", e.rmse, e.mae, e.sde);
        log << buf;
    }
    write_text(fs::path(cfg.output_dir) / "train_log.txt", log.str());

    std::cout << "pipeline written to " << pipe_path.string() << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.output_dir);

    TimeSeries data = cfg.load_series();
    ExperimentOptions opts;
    opts.n_runs = cfg.n_runs;
    opts.base_seed = cfg.base_seed;
    opts.fractions = cfg.fractions;
    opts.lag_spec = cfg.lag_spec;
    opts.include_baseline = cfg.baseline;
    opts.progress = [](const std::string& m) { std::cerr << m << "\n"; };

    ExperimentReport report = run_experiment(data, cfg.jet, opts);

    write_text(fs::path(cfg.output_dir) / "report.csv", report.to_csv());
    write_text(fs::path(cfg.output_dir) / "report.txt", report.to_table());
    {
        std::ostringstream os;
        os << "timestamp,actual,predicted\n";
        char buf[96];
        for (std::size_t i = 0; i < report.plot_actual.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g\n",
                          (long long)report.plot_timestamps[i], report.plot_actual[i],
                          report.plot_predicted[i]);
            os << buf;
        }
        write_text(fs::path(cfg.output_dir) / "plot.csv", os.str());
    }
    std::cout << report.to_table();
    return 0;
}

int cmd_predict(const std::string& pipeline_path, const std::string& csv_path,
                const std::string& out_path) {
    JetPipeline pipe = JetPipeline::load(pipeline_path);
    TimeSeries data = load_csv(csv_path);
    LagDataset lag = build_lag_matrix(data, pipe.lag_spec);
    std::vector<double> preds = predict(pipe, lag);
    std::ostringstream os;
    os << "timestamp,predicted_ws\n";
    char buf[64];
    for (std::size_t i = 0; i < preds.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%lld,%.17g\n", (long long)lag.timestamps[i],
                      preds[i]);
        os << buf;
    }
    write_text(out_path, os.str());
    std::cout << "wrote " << preds.size() << " predictions to " << out_path << "\n";
    return 0;
}

int cmd_gradcheck(std::uint64_t seed) {
    auto cases = grad_check_menu(seed);
    bool all_ok = true;
    for (const auto& c : cases) {
        std::printf("%-24s max_rel_error=%.3e %s\n", c.name.c_str(), c.max_rel_error,
                    c.passed ? "PASS" : "FAIL");
        all_ok = all_ok && c.passed;
    }
    return all_ok ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DEL-Jet wind-speed forecaster"};
    app.require_subcommand(1);

    std::string config_path, out_arg, pipeline_arg, data_arg;
    std::uint64_t seed = 0;
    bool baseline = false;
    std::size_t runs = 0;

    auto* synth = app.add_subcommand("synth", "generate a synthetic wind-farm CSV");
    synth->add_option("--config", config_path);
    synth->add_option("--out", out_arg, "output CSV path")->required();
    auto* synth_seed = synth->add_option("--seed", seed);

    auto* train = app.add_subcommand("train", "train and persist a pipeline");
    train->add_option("--config", config_path);
    auto* train_seed = train->add_option("--seed", seed);
    train->add_option("--out", out_arg, "output directory");

    auto* evaluate = app.add_subcommand("evaluate", "run the repeated-seed experiment");
    evaluate->add_option("--config", config_path);
    auto* eval_seed = evaluate->add_option("--seed", seed);
    evaluate->add_option("--runs", runs, "number of runs");
    evaluate->add_option("--out", out_arg, "output directory");
    evaluate->add_flag("--baseline", baseline, "also evaluate the raw-feature MLP baseline");

    auto* predict_cmd = app.add_subcommand("predict", "predict from a saved pipeline");
    predict_cmd->add_option("--pipeline", pipeline_arg)->required();
    predict_cmd->add_option("--data", data_arg)->required();
    predict_cmd->add_option("--out", out_arg)->required();

    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
    gradcheck->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = RunConfig::parse_file(config_path);
        bool seed_set = synth_seed->count() > 0 || train_seed->count() > 0 ||
                        eval_seed->count() > 0;
        if (seed_set) {
            cfg.base_seed = seed;
            cfg.synth.seed = seed;
        }
        if (runs > 0) cfg.n_runs = runs;
        if (baseline) cfg.baseline = true;

        if (synth->parsed()) return cmd_synth(cfg, out_arg);
        if (train->parsed()) {
            if (!out_arg.empty()) cfg.output_dir = out_arg;
            return cmd_train(cfg);
        }
        if (evaluate->parsed()) {
            if (!out_arg.empty()) cfg.output_dir = out_arg;
            return cmd_evaluate(cfg);
        }
        if (predict_cmd->parsed()) return cmd_predict(pipeline_arg, data_arg, out_arg);
        if (gradcheck->parsed()) return cmd_gradcheck(seed);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitData;
    } catch (const LoadError& e) {
        std::cerr << "load error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return 2;
}
