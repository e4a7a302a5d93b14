#ifndef DELJET_PIPELINE_HPP
#define DELJET_PIPELINE_HPP

#include <filesystem>
#include <optional>

#include "deljet/metrics.hpp"
#include "deljet/models.hpp"

namespace deljet {

struct BodyConfig {
    std::size_t bottleneck = 200;
    std::size_t epochs = 100;
    double learning_rate = 0.001;
    double momentum = 0.9;
    std::size_t batch_size = 32;

    void validate(std::size_t input_width) const;
};

struct NoseConfig {
    std::size_t hidden = 26;
    std::size_t epochs = 500;
    double learning_rate = 0.001;
    double momentum = 0.9;
    std::size_t batch_size = 32;

    void validate() const;
};

struct JetConfigs {
    CnnConfig wing1 = CnnConfig::wing1_default();
    CnnConfig wing2 = CnnConfig::wing2_default();
    TailConfig tail = TailConfig::defaults();
    BodyConfig body;
    NoseConfig nose;
    ProbeConfig probe;
};

struct PipelineWidths {
    std::size_t concat = 0;   // original + wing1 + wing2 + tail
    std::size_t reduced = 0;  // body bottleneck
    std::size_t nose_in = 0;  // reduced + original
};

// The trained ensemble: two CNN wings, a stacked sparse-AE tail, a
// nonlinear-PCA body, and an MLP nose, plus the fitted scaler.
struct JetPipeline {
    LagSpec lag_spec;
    MinMaxScaler scaler;
    TrainedWing wing1, wing2;
    TrainedTail tail;
    Network body;
    Network nose;
    PipelineWidths widths;

    void save(const std::filesystem::path& path) const;
    static JetPipeline load(const std::filesystem::path& path);
};

// [original | wing1 | wing2 | tail], row counts must agree.
Matrix assemble_concat_features(const Matrix& original, const Matrix& wing1_f,
                                const Matrix& wing2_f, const Matrix& tail_codes);

Network train_body(const Matrix& concat_train, const BodyConfig& cfg, std::uint64_t seed);
Matrix body_encode(const Network& body, const Matrix& X);

Network train_nose(const Matrix& reduced, const Matrix& original,
                   const std::vector<double>& targets, const NoseConfig& cfg,
                   std::uint64_t seed);

// Training-split matrices produced while fitting, reusable for stage scoring.
struct FitArtifacts {
    Matrix concat_train;
    Matrix reduced_train;
};

// Phases 1-3 on pre-scaled splits: wings and tail, then the nonlinear-PCA
// body on the concatenated feature space, then the nose.
JetPipeline fit_pipeline(const LagDataset& train_scaled, const LagDataset& val_scaled,
                         const JetConfigs& configs, std::uint64_t seed,
                         const MinMaxScaler& scaler, FitArtifacts* artifacts = nullptr);

std::vector<double> predict(const JetPipeline& pipe, const LagDataset& rows);

struct StageStats {
    std::string stage;
    std::vector<ErrorStats> runs;
    AggregateStats aggregate;
};

struct ExperimentReport {
    std::size_t n_runs = 0;
    std::vector<StageStats> stages;  // wing1, wing2, tail, body, nose[, baseline_mlp]
    // Test-split actual/predicted (m/s) of the nose on the last run, with
    // per-sample timestamps; feeds the predicted-vs-actual plot data.
    std::vector<std::int64_t> plot_timestamps;
    std::vector<double> plot_actual, plot_predicted;

    std::string to_csv() const;
    std::string to_table() const;
};

struct ExperimentOptions {
    std::size_t n_runs = 10;
    std::uint64_t base_seed = 0;
    SplitFractions fractions;
    LagSpec lag_spec;
    bool include_baseline = false;
    std::function<void(const std::string&)> progress;  // optional log sink
};

ExperimentReport run_experiment(const TimeSeries& data, const JetConfigs& configs,
                                const ExperimentOptions& options);

}  // namespace deljet

#endif
