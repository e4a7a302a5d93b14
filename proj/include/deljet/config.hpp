#ifndef DELJET_CONFIG_HPP
#define DELJET_CONFIG_HPP

#include <filesystem>
#include <string>

#include "deljet/pipeline.hpp"

namespace deljet {

// One key/value config file, sections named after the jet anatomy. Defaults
// reproduce the reference hyperparameter tables and split fractions.
struct RunConfig {
    // [data]
    std::string source = "synth";  // synth | csv
    std::string csv_path;
    SynthConfig synth;
    LagSpec lag_spec;
    SplitFractions fractions;

    // [wing1] [wing2] [tail] [body] [nose] [probe]
    JetConfigs jet;

    // [experiment]
    std::size_t n_runs = 10;
    std::uint64_t base_seed = 0;
    std::string output_dir = "out";
    bool baseline = false;

    void validate() const;
    std::string serialize() const;
    static RunConfig parse_string(const std::string& text);
    static RunConfig parse_file(const std::filesystem::path& path);

    TimeSeries load_series() const;

    bool operator==(const RunConfig& o) const { return serialize() == o.serialize(); }
};

}  // namespace deljet

#endif
