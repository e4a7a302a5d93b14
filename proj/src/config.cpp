#include "deljet/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace deljet {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_f64(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double to_f64(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value '" + v + "' for " + key);
    }
}

std::uint64_t to_u64(const std::string& v, const std::string& key) {
    std::uint64_t d = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("bad integer value '" + v + "' for " + key);
    return d;
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("bad boolean value '" + v + "' for " + key);
}

void emit_sgd_like(std::ostringstream& os, double lr, double momentum,
                   std::uint64_t batch) {
    os << "learning_rate = " << fmt_f64(lr) << "\n";
    os << "momentum = " << fmt_f64(momentum) << "\n";
    os << "batch_size = " << batch << "\n";
}

}  // namespace

void RunConfig::validate() const {
    if (source != "synth" && source != "csv")
        throw ConfigError("data source must be 'synth' or 'csv'");
    if (source == "csv" && csv_path.empty())
        throw ConfigError("csv source requires csv_path");
    lag_spec.validate();
    fractions.validate();
    jet.wing1.validate();
    jet.wing2.validate();
    jet.tail.validate();
    jet.nose.validate();
    if (n_runs < 1) throw ConfigError("n_runs must be >= 1");
}

std::string RunConfig::serialize() const {
    std::ostringstream os;
    os << "[data]\n";
    os << "source = " << source << "\n";
    os << "csv_path = " << csv_path << "\n";
    os << "synth_length = " << synth.length << "\n";
    os << "synth_seed = " << synth.seed << "\n";
    os << "synth_noise_std = " << fmt_f64(synth.noise_std) << "\n";
    os << "lag_step_minutes = " << lag_spec.step_minutes << "\n";
    os << "num_lags = " << lag_spec.num_lags << "\n";
    os << "train_fraction = " << fmt_f64(fractions.train) << "\n";
    os << "val_fraction = " << fmt_f64(fractions.val) << "\n";
    os << "test_fraction = " << fmt_f64(fractions.test) << "\n";

    for (const CnnConfig* w : {&jet.wing1, &jet.wing2}) {
        os << "\n[" << w->name << "]\n";
        os << "number_of_layers = " << w->number_of_layers << "\n";
        os << "number_of_epochs = " << w->number_of_epochs << "\n";
        os << "initial_learning_rate = " << fmt_f64(w->initial_learning_rate) << "\n";
        os << "momentum = " << fmt_f64(w->momentum) << "\n";
        os << "batch_size = " << w->batch_size << "\n";
        os << "feature_width = " << w->feature_width << "\n";
    }

    os << "\n[tail]\n";
    emit_sgd_like(os, jet.tail.learning_rate, jet.tail.momentum, jet.tail.batch_size);
    for (std::size_t i = 0; i < jet.tail.layers.size(); ++i) {
        const auto& l = jet.tail.layers[i];
        std::string p = "layer" + std::to_string(i + 1) + "_";
        os << p << "neurons = " << l.neurons << "\n";
        os << p << "max_epoch = " << l.max_epoch << "\n";
        os << p << "l2_weight_regularization = " << fmt_f64(l.l2_weight) << "\n";
        os << p << "sparsity_regularization = " << fmt_f64(l.sparsity_reg) << "\n";
        os << p << "sparsity_proportion = " << fmt_f64(l.sparsity_prop) << "\n";
    }

    os << "\n[body]\n";
    os << "bottleneck = " << jet.body.bottleneck << "\n";
    os << "epochs = " << jet.body.epochs << "\n";
    emit_sgd_like(os, jet.body.learning_rate, jet.body.momentum, jet.body.batch_size);

    os << "\n[nose]\n";
    os << "hidden = " << jet.nose.hidden << "\n";
    os << "epochs = " << jet.nose.epochs << "\n";
    emit_sgd_like(os, jet.nose.learning_rate, jet.nose.momentum, jet.nose.batch_size);

    os << "\n[probe]\n";
    os << "hidden = " << jet.probe.hidden << "\n";
    os << "epochs = " << jet.probe.epochs << "\n";
    emit_sgd_like(os, jet.probe.learning_rate, jet.probe.momentum, jet.probe.batch_size);

    os << "\n[experiment]\n";
    os << "n_runs = " << n_runs << "\n";
    os << "base_seed = " << base_seed << "\n";
    os << "output_dir = " << output_dir << "\n";
    os << "baseline = " << (baseline ? "true" : "false") << "\n";
    return os.str();
}

RunConfig RunConfig::parse_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("bad config line " + std::to_string(line_no) + ": " + line);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        std::string qual = section + "." + key;

        auto set_sgd_like = [&](double& lr, double& mom, std::size_t& batch) {
            if (key == "learning_rate") lr = to_f64(val, qual);
            else if (key == "momentum") mom = to_f64(val, qual);
            else if (key == "batch_size") batch = to_u64(val, qual);
            else throw ConfigError("unknown key " + qual);
        };

        if (section == "data") {
            if (key == "source") cfg.source = val;
            else if (key == "csv_path") cfg.csv_path = val;
            else if (key == "synth_length") cfg.synth.length = to_u64(val, qual);
            else if (key == "synth_seed") cfg.synth.seed = to_u64(val, qual);
            else if (key == "synth_noise_std") cfg.synth.noise_std = to_f64(val, qual);
            else if (key == "lag_step_minutes")
                cfg.lag_spec.step_minutes = (std::int64_t)to_u64(val, qual);
            else if (key == "num_lags") cfg.lag_spec.num_lags = to_u64(val, qual);
            else if (key == "train_fraction") cfg.fractions.train = to_f64(val, qual);
            else if (key == "val_fraction") cfg.fractions.val = to_f64(val, qual);
            else if (key == "test_fraction") cfg.fractions.test = to_f64(val, qual);
            else throw ConfigError("unknown key " + qual);
        } else if (section == "wing1" || section == "wing2") {
            CnnConfig& w = section == "wing1" ? cfg.jet.wing1 : cfg.jet.wing2;
            w.name = section;
            if (key == "number_of_layers") w.number_of_layers = to_u64(val, qual);
            else if (key == "number_of_epochs") w.number_of_epochs = to_u64(val, qual);
            else if (key == "initial_learning_rate")
                w.initial_learning_rate = to_f64(val, qual);
            else if (key == "momentum") w.momentum = to_f64(val, qual);
            else if (key == "batch_size") w.batch_size = to_u64(val, qual);
            else if (key == "feature_width") w.feature_width = to_u64(val, qual);
            else throw ConfigError("unknown key " + qual);
        } else if (section == "tail") {
            if (key.rfind("layer", 0) == 0) {
                auto us = key.find('_');
                if (us == std::string::npos) throw ConfigError("unknown key " + qual);
                std::size_t idx = to_u64(key.substr(5, us - 5), qual);
                if (idx < 1 || idx > cfg.jet.tail.layers.size())
                    throw ConfigError("tail layer index out of range in " + qual);
                auto& l = cfg.jet.tail.layers[idx - 1];
                std::string field = key.substr(us + 1);
                if (field == "neurons") l.neurons = to_u64(val, qual);
                else if (field == "max_epoch") l.max_epoch = to_u64(val, qual);
                else if (field == "l2_weight_regularization") l.l2_weight = to_f64(val, qual);
                else if (field == "sparsity_regularization") l.sparsity_reg = to_f64(val, qual);
                else if (field == "sparsity_proportion") l.sparsity_prop = to_f64(val, qual);
                else throw ConfigError("unknown key " + qual);
            } else {
                set_sgd_like(cfg.jet.tail.learning_rate, cfg.jet.tail.momentum,
                             cfg.jet.tail.batch_size);
            }
        } else if (section == "body") {
            if (key == "bottleneck") cfg.jet.body.bottleneck = to_u64(val, qual);
            else if (key == "epochs") cfg.jet.body.epochs = to_u64(val, qual);
            else
                set_sgd_like(cfg.jet.body.learning_rate, cfg.jet.body.momentum,
                             cfg.jet.body.batch_size);
        } else if (section == "nose") {
            if (key == "hidden") cfg.jet.nose.hidden = to_u64(val, qual);
            else if (key == "epochs") cfg.jet.nose.epochs = to_u64(val, qual);
            else
                set_sgd_like(cfg.jet.nose.learning_rate, cfg.jet.nose.momentum,
                             cfg.jet.nose.batch_size);
        } else if (section == "probe") {
            if (key == "hidden") cfg.jet.probe.hidden = to_u64(val, qual);
            else if (key == "epochs") cfg.jet.probe.epochs = to_u64(val, qual);
            else
                set_sgd_like(cfg.jet.probe.learning_rate, cfg.jet.probe.momentum,
                             cfg.jet.probe.batch_size);
        } else if (section == "experiment") {
            if (key == "n_runs") cfg.n_runs = to_u64(val, qual);
            else if (key == "base_seed") cfg.base_seed = to_u64(val, qual);
            else if (key == "output_dir") cfg.output_dir = val;
            else if (key == "baseline") cfg.baseline = to_bool(val, qual);
            else throw ConfigError("unknown key " + qual);
        } else {
            throw ConfigError("unknown section [" + section + "]");
        }
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DataNotFound("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str());
}

TimeSeries RunConfig::load_series() const {
    if (source == "csv") return load_csv(csv_path);
    return synth_generate(synth);
}

}  // namespace deljet
