#include "deljet/pipeline.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "deljet/io.hpp"

namespace deljet {

namespace {

// Sub-seed offsets within one run; runs are spaced by *1000 so streams never
// overlap.
constexpr std::uint64_t kWing1Off = 1, kWing2Off = 2, kTailOff = 300, kBodyOff = 500,
                        kNoseOff = 600, kBodyProbeOff = 700, kBaselineOff = 800;

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t off) {
    return seed * 1000 + off;
}

}  // namespace

void BodyConfig::validate(std::size_t input_width) const {
    if (bottleneck < 1) throw ConfigError("body bottleneck must be >= 1");
    if (bottleneck >= input_width)
        throw BottleneckTooWide("body bottleneck " + std::to_string(bottleneck) +
                                " must be narrower than its input " +
                                std::to_string(input_width));
    if (epochs < 1) throw ConfigError("body epochs must be >= 1");
    if (learning_rate <= 0) throw ConfigError("body learning rate must be > 0");
}

void NoseConfig::validate() const {
    if (hidden < 1) throw ConfigError("nose hidden width must be >= 1");
    if (epochs < 1) throw ConfigError("nose epochs must be >= 1");
    if (learning_rate <= 0) throw ConfigError("nose learning rate must be > 0");
}

Matrix assemble_concat_features(const Matrix& original, const Matrix& wing1_f,
                                const Matrix& wing2_f, const Matrix& tail_codes) {
    std::size_t n = original.rows;
    if (wing1_f.rows != n || wing2_f.rows != n || tail_codes.rows != n)
        throw ShapeMismatch("feature blocks have differing row counts");
    Matrix out(n, original.cols + wing1_f.cols + wing2_f.cols + tail_codes.cols);
    for (std::size_t r = 0; r < n; ++r) {
        double* dst = out.row(r);
        std::memcpy(dst, original.row(r), original.cols * sizeof(double));
        dst += original.cols;
        std::memcpy(dst, wing1_f.row(r), wing1_f.cols * sizeof(double));
        dst += wing1_f.cols;
        std::memcpy(dst, wing2_f.row(r), wing2_f.cols * sizeof(double));
        dst += wing2_f.cols;
        std::memcpy(dst, tail_codes.row(r), tail_codes.cols * sizeof(double));
    }
    return out;
}

Network train_body(const Matrix& concat_train, const BodyConfig& cfg,
                   std::uint64_t seed) {
    cfg.validate(concat_train.cols);
    // Identity-reconstruction AE, sigmoid hidden, linear output, no sparsity.
    Network body({Dense{concat_train.cols, cfg.bottleneck}, Activation{Act::Sigmoid},
                  Dense{cfg.bottleneck, concat_train.cols}},
                 {concat_train.cols}, seed);
    SgdMomentumConfig opt;
    opt.learning_rate = cfg.learning_rate;
    opt.momentum = cfg.momentum;
    opt.epochs = cfg.epochs;
    opt.batch_size = cfg.batch_size;
    Tensor X = matrix_to_tensor(concat_train);
    MseObjective mse;
    train_network(body, mse, X, X, opt);
    return body;
}

Matrix body_encode(const Network& body, const Matrix& X) {
    std::size_t width = std::get<Dense>(body.specs()[0]).out;
    Matrix out(X.rows, width);
    constexpr std::size_t kBatch = 512;
    for (std::size_t start = 0; start < X.rows; start += kBatch) {
        std::size_t count = std::min(kBatch, X.rows - start);
        Tensor xb({count, X.cols});
        std::copy(X.row(start), X.row(start) + count * X.cols, xb.data());
        Matrix f = body.extract_features(xb, 1);
        std::copy(f.v.begin(), f.v.end(), out.row(start));
    }
    return out;
}

namespace {
Matrix hconcat(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows) throw ShapeMismatch("hconcat row counts differ");
    Matrix out(a.rows, a.cols + b.cols);
    for (std::size_t r = 0; r < a.rows; ++r) {
        std::memcpy(out.row(r), a.row(r), a.cols * sizeof(double));
        std::memcpy(out.row(r) + a.cols, b.row(r), b.cols * sizeof(double));
    }
    return out;
}
}  // namespace

Network train_nose(const Matrix& reduced, const Matrix& original,
                   const std::vector<double>& targets, const NoseConfig& cfg,
                   std::uint64_t seed) {
    cfg.validate();
    if (reduced.rows != original.rows || reduced.rows != targets.size())
        throw ShapeMismatch("nose training inputs have differing row counts");
    Matrix input = hconcat(reduced, original);
    ProbeConfig pc{cfg.hidden, cfg.epochs, cfg.learning_rate, cfg.momentum,
                   cfg.batch_size};
    return fit_probe(input, targets, seed, pc);
}

JetPipeline fit_pipeline(const LagDataset& train_scaled, const LagDataset& val_scaled,
                         const JetConfigs& configs, std::uint64_t seed,
                         const MinMaxScaler& scaler, FitArtifacts* artifacts) {
    JetPipeline pipe;
    pipe.lag_spec = train_scaled.spec;
    pipe.scaler = scaler;

    // Phase 1: diverse base feature spaces.
    pipe.wing1 = train_wing(configs.wing1, train_scaled, val_scaled,
                            sub_seed(seed, kWing1Off));
    pipe.wing2 = train_wing(configs.wing2, train_scaled, val_scaled,
                            sub_seed(seed, kWing2Off));
    pipe.tail = train_tail(configs.tail, train_scaled, sub_seed(seed, kTailOff),
                           configs.probe);

    Matrix w1f = pipe.wing1.features(train_scaled);
    Matrix w2f = pipe.wing2.features(train_scaled);
    Matrix codes = pipe.tail.encode(train_scaled.X);
    Matrix concat = assemble_concat_features(train_scaled.X, w1f, w2f, codes);

    // Phase 2: nonlinear PCA reduction.
    pipe.body = train_body(concat, configs.body, sub_seed(seed, kBodyOff));
    Matrix reduced = body_encode(pipe.body, concat);

    // Phase 3: meta-regressor on reduced + original features.
    pipe.nose = train_nose(reduced, train_scaled.X, train_scaled.y, configs.nose,
                           sub_seed(seed, kNoseOff));

    pipe.widths = {concat.cols, reduced.cols, reduced.cols + train_scaled.X.cols};
    if (artifacts) {
        artifacts->concat_train = std::move(concat);
        artifacts->reduced_train = std::move(reduced);
    }
    return pipe;
}

std::vector<double> predict(const JetPipeline& pipe, const LagDataset& rows) {
    LagDataset scaled = apply_scaler(pipe.scaler, rows);
    Matrix w1f = pipe.wing1.features(scaled);
    Matrix w2f = pipe.wing2.features(scaled);
    Matrix codes = pipe.tail.encode(scaled.X);
    Matrix concat = assemble_concat_features(scaled.X, w1f, w2f, codes);
    Matrix reduced = body_encode(pipe.body, concat);
    Matrix nose_in = hconcat(reduced, scaled.X);
    return invert_target(pipe.scaler, network_predict(pipe.nose, nose_in));
}

ExperimentReport run_experiment(const TimeSeries& data, const JetConfigs& configs,
                                const ExperimentOptions& options) {
    if (options.n_runs < 1) throw ConfigError("n_runs must be >= 1");
    auto log = [&](const std::string& msg) {
        if (options.progress) options.progress(msg);
    };

    LagDataset lag = build_lag_matrix(data, options.lag_spec);
    ChronoSplit split = chrono_split(lag, options.fractions);
    MinMaxScaler scaler = fit_scaler(split.train);
    LagDataset train_s = apply_scaler(scaler, split.train);
    LagDataset val_s = apply_scaler(scaler, split.val);
    LagDataset test_s = apply_scaler(scaler, split.test);
    const std::vector<double>& actual = split.test.y;

    ExperimentReport report;
    report.n_runs = options.n_runs;
    std::vector<std::string> stage_names = {"wing1", "wing2", "tail", "body", "nose"};
    if (options.include_baseline) stage_names.push_back("baseline_mlp");
    for (const auto& s : stage_names) report.stages.push_back({s, {}, {}});

    for (std::size_t r = 0; r < options.n_runs; ++r) {
        std::uint64_t seed = options.base_seed + r;
        log("run " + std::to_string(r + 1) + "/" + std::to_string(options.n_runs) +
            " (seed " + std::to_string(seed) + ")");

        FitArtifacts art;
        JetPipeline pipe = fit_pipeline(train_s, val_s, configs, seed, scaler, &art);

        Matrix w1f_t = pipe.wing1.features(test_s);
        Matrix w2f_t = pipe.wing2.features(test_s);
        Matrix codes_t = pipe.tail.encode(test_s.X);
        Matrix concat_t = assemble_concat_features(test_s.X, w1f_t, w2f_t, codes_t);
        Matrix reduced_t = body_encode(pipe.body, concat_t);

        auto score = [&](std::size_t stage, std::vector<double> scaled_pred) {
            PredictionSeries p{actual, invert_target(scaler, scaled_pred)};
            report.stages[stage].runs.push_back(error_stats(p));
        };

        score(0, pipe.wing1.predict(test_s));
        score(1, pipe.wing2.predict(test_s));
        score(2, network_predict(pipe.tail.probe, codes_t));

        Network body_probe = fit_probe(art.reduced_train, train_s.y,
                                       sub_seed(seed, kBodyProbeOff), configs.probe);
        score(3, network_predict(body_probe, reduced_t));

        Matrix nose_in_t = hconcat(reduced_t, test_s.X);
        std::vector<double> nose_scaled = network_predict(pipe.nose, nose_in_t);
        score(4, nose_scaled);

        if (options.include_baseline) {
            Network base = fit_probe(train_s.X, train_s.y, sub_seed(seed, kBaselineOff),
                                     configs.probe);
            score(5, network_predict(base, test_s.X));
        }

        if (r + 1 == options.n_runs) {
            report.plot_timestamps = split.test.timestamps;
            report.plot_actual = actual;
            report.plot_predicted = invert_target(scaler, nose_scaled);
        }
    }

    for (auto& st : report.stages) st.aggregate = aggregate_runs(st.runs);
    return report;
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    os << "run,stage,rmse,mae,sde\n";
    char buf[160];
    for (const auto& st : stages)
        for (std::size_t r = 0; r < st.runs.size(); ++r) {
            std::snprintf(buf, sizeof(buf), "%zu,%s,%.17g,%.17g,%.17g\n", r + 1,
                          st.stage.c_str(), st.runs[r].rmse, st.runs[r].mae,
                          st.runs[r].sde);
            os << buf;
        }
    for (const auto& st : stages) {
        std::snprintf(buf, sizeof(buf), "mean,%s,%.17g,%.17g,%.17g\n", st.stage.c_str(),
                      st.aggregate.rmse.mean, st.aggregate.mae.mean,
                      st.aggregate.sde.mean);
        os << buf;
        std::snprintf(buf, sizeof(buf), "std,%s,%.17g,%.17g,%.17g\n", st.stage.c_str(),
                      st.aggregate.rmse.std, st.aggregate.mae.std, st.aggregate.sde.std);
        os << buf;
    }
    return os.str();
}

std::string ExperimentReport::to_table() const {
    std::ostringstream os;
    auto block = [&](const char* title, auto metric, auto agg) {
        os << title << "\n";
        os << "run";
        for (const auto& st : stages) os << "\t" << st.stage;
        os << "\n";
        for (std::size_t r = 0; r < n_runs; ++r) {
            os << (r + 1);
            char buf[32];
            for (const auto& st : stages) {
                std::snprintf(buf, sizeof(buf), "\t%.4f", metric(st.runs[r]));
                os << buf;
            }
            os << "\n";
        }
        os << "mean±std";
        for (const auto& st : stages) os << "\t" << format_mean_std(agg(st.aggregate));
        os << "\n\n";
    };
    block("RMSE", [](const ErrorStats& e) { return e.rmse; },
          [](const AggregateStats& a) { return a.rmse; });
    block("MAE", [](const ErrorStats& e) { return e.mae; },
          [](const AggregateStats& a) { return a.mae; });
    block("SDE", [](const ErrorStats& e) { return e.sde; },
          [](const AggregateStats& a) { return a.sde; });
    return os.str();
}

namespace {

constexpr char kPipeMagic[] = "DJPIPE1";

void save_cnn_config(std::ostream& os, const CnnConfig& c) {
    io::write_string(os, c.name);
    io::write_u64(os, c.number_of_layers);
    io::write_u64(os, c.number_of_epochs);
    io::write_f64(os, c.initial_learning_rate);
    io::write_f64(os, c.momentum);
    io::write_u64(os, c.batch_size);
    io::write_u64(os, c.feature_width);
}

CnnConfig load_cnn_config(std::istream& is) {
    CnnConfig c;
    c.name = io::read_string(is);
    c.number_of_layers = io::read_u64(is);
    c.number_of_epochs = io::read_u64(is);
    c.initial_learning_rate = io::read_f64(is);
    c.momentum = io::read_f64(is);
    c.batch_size = io::read_u64(is);
    c.feature_width = io::read_u64(is);
    return c;
}

void save_tail_config(std::ostream& os, const TailConfig& c) {
    for (const auto& l : c.layers) {
        io::write_u64(os, l.neurons);
        io::write_u64(os, l.max_epoch);
        io::write_f64(os, l.l2_weight);
        io::write_f64(os, l.sparsity_reg);
        io::write_f64(os, l.sparsity_prop);
    }
    io::write_f64(os, c.learning_rate);
    io::write_f64(os, c.momentum);
    io::write_u64(os, c.batch_size);
}

TailConfig load_tail_config(std::istream& is) {
    TailConfig c;
    for (auto& l : c.layers) {
        l.neurons = io::read_u64(is);
        l.max_epoch = io::read_u64(is);
        l.l2_weight = io::read_f64(is);
        l.sparsity_reg = io::read_f64(is);
        l.sparsity_prop = io::read_f64(is);
    }
    c.learning_rate = io::read_f64(is);
    c.momentum = io::read_f64(is);
    c.batch_size = io::read_u64(is);
    return c;
}

void save_wing(std::ostream& os, const TrainedWing& w) {
    save_cnn_config(os, w.config);
    io::write_u64(os, w.feature_layer);
    io::write_f64_array(os, w.val_rmse_per_epoch);
    w.net.save(os);
}

TrainedWing load_wing(std::istream& is) {
    TrainedWing w;
    w.config = load_cnn_config(is);
    w.feature_layer = io::read_u64(is);
    w.val_rmse_per_epoch = io::read_f64_array(is);
    w.net = Network::load(is);
    return w;
}

}  // namespace

void JetPipeline::save(const std::filesystem::path& path) const {
    io::atomic_write(path, [&](std::ostream& os) {
        os.write(kPipeMagic, sizeof(kPipeMagic) - 1);
        io::write_u64(os, (std::uint64_t)lag_spec.step_minutes);
        io::write_u64(os, lag_spec.num_lags);
        io::write_f64_array(os, scaler.col_min);
        io::write_f64_array(os, scaler.col_max);
        io::write_f64(os, scaler.y_min);
        io::write_f64(os, scaler.y_max);
        save_wing(os, wing1);
        save_wing(os, wing2);
        save_tail_config(os, tail.config);
        io::write_u64(os, tail.autoencoders.size());
        for (const auto& ae : tail.autoencoders) ae.save(os);
        tail.probe.save(os);
        body.save(os);
        nose.save(os);
        io::write_u64(os, widths.concat);
        io::write_u64(os, widths.reduced);
        io::write_u64(os, widths.nose_in);
    });
}

JetPipeline JetPipeline::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw LoadError("cannot open pipeline file " + path.string());
    char magic[sizeof(kPipeMagic) - 1];
    is.read(magic, sizeof(magic));
    if (is.gcount() != (std::streamsize)sizeof(magic) ||
        std::memcmp(magic, kPipeMagic, sizeof(magic)) != 0)
        throw LoadError("not a pipeline container: " + path.string());
    JetPipeline p;
    p.lag_spec.step_minutes = (std::int64_t)io::read_u64(is);
    p.lag_spec.num_lags = io::read_u64(is);
    p.scaler.col_min = io::read_f64_array(is);
    p.scaler.col_max = io::read_f64_array(is);
    p.scaler.y_min = io::read_f64(is);
    p.scaler.y_max = io::read_f64(is);
    p.wing1 = load_wing(is);
    p.wing2 = load_wing(is);
    p.tail.config = load_tail_config(is);
    std::uint64_t n_ae = io::read_u64(is);
    for (std::uint64_t i = 0; i < n_ae; ++i) p.tail.autoencoders.push_back(Network::load(is));
    p.tail.probe = Network::load(is);
    p.body = Network::load(is);
    p.nose = Network::load(is);
    p.widths.concat = io::read_u64(is);
    p.widths.reduced = io::read_u64(is);
    p.widths.nose_in = io::read_u64(is);
    return p;
}

}  // namespace deljet
