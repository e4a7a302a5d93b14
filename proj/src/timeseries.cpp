#include "deljet/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

#include "deljet/errors.hpp"
#include "deljet/io.hpp"
#include "deljet/rng.hpp"

namespace deljet {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_double(const std::string& s, long line_no) {
    double v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw MalformedRow("non-numeric field '" + s + "'", line_no);
    return v;
}

std::int64_t parse_i64(const std::string& s, long line_no) {
    std::int64_t v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw MalformedRow("non-integer timestamp '" + s + "'", line_no);
    return v;
}

void validate_record(const RawRecord& r, long line_no) {
    for (double s : r.speeds)
        if (s < 0) throw MalformedRow("negative wind speed", line_no);
    for (double f : r.features)
        if (!std::isfinite(f)) throw MalformedRow("non-finite feature", line_no);
}

}  // namespace

TimeSeries load_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DataNotFound("cannot open " + path.string());

    std::string line;
    if (!std::getline(is, line)) throw SchemaMismatch("empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw SchemaMismatch("unexpected CSV header in " + path.string());

    TimeSeries ts;
    long line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 13)
            throw MalformedRow("expected 13 fields, got " + std::to_string(fields.size()),
                               line_no);
        RawRecord r;
        r.timestamp = parse_i64(fields[0], line_no);
        for (int i = 0; i < kNumFeatures; ++i)
            r.features[i] = parse_double(fields[1 + i], line_no);
        for (int i = 0; i < 4; ++i) r.speeds[i] = parse_double(fields[9 + i], line_no);
        validate_record(r, line_no);
        if (!ts.records.empty()) {
            std::int64_t dt = r.timestamp - ts.records.back().timestamp;
            if (dt <= 0) throw NonMonotonicTimestamp(line_no);
            if (dt != kCadenceMinutes) throw CadenceGap(line_no);
        }
        ts.records.push_back(r);
        ts.target.push_back(r.target());
    }
    return ts;
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path) {
    io::atomic_write(path, [&](std::ostream& os) {
        os << kCsvHeader << '\n';
        char buf[512];
        for (const auto& r : series.records) {
            int n = std::snprintf(
                buf, sizeof(buf),
                "%lld,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,"
                "%.10g\n",
                (long long)r.timestamp, r.features[0], r.features[1], r.features[2],
                r.features[3], r.features[4], r.features[5], r.features[6], r.features[7],
                r.speeds[0], r.speeds[1], r.speeds[2], r.speeds[3]);
            os.write(buf, n);
        }
    });
}

TimeSeries synth_generate(const SynthConfig& config) {
    if (config.length < 1) throw ConfigError("synthetic series length must be >= 1");

    Rng rng(config.seed);
    TimeSeries ts;
    ts.records.reserve(config.length);
    ts.target.reserve(config.length);

    constexpr double kTwoPi = 6.283185307179586476925286766559;
    auto diurnal = [&](double i) { return std::sin(kTwoPi * i / 144.0); };
    double ns = config.noise_std;

    double w_prev = 0.0, s_prev = 5.0;
    for (std::size_t i = 0; i < config.length; ++i) {
        double d_prev = diurnal((double)i - 1.0);
        double d = diurnal((double)i);

        double w = 0.98 * w_prev + 0.2 * ns * rng.normal();

        std::array<double, kNumFeatures> nf{};
        for (auto& n : nf) n = 0.5 * ns * rng.normal();

        double s = 5.0 + 0.6 * (s_prev - 5.0) + 2.5 * std::tanh(w_prev) +
                   1.2 * d_prev + 0.3 * std::tanh(s_prev - 5.0) + 0.2 * ns * rng.normal();
        s = std::max(0.0, s);

        RawRecord r;
        r.timestamp = (std::int64_t)i * kCadenceMinutes;
        r.features = {180.0 + 60.0 * w + 20.0 * d + nf[0],
                      15.0 + 5.0 * std::abs(w) + nf[1],
                      175.0 + 55.0 * w + nf[2],
                      18.0 + 4.0 * std::abs(w) + nf[3],
                      20.0 + 8.0 * d + 2.0 * w + nf[4],
                      18.0 + 6.0 * d + 2.0 * w + nf[5],
                      std::clamp(60.0 - 10.0 * d - 5.0 * w + nf[6], 0.0, 100.0),
                      1010.0 + 4.0 * w + nf[7]};
        r.speeds = {std::max(0.0, 1.08 * s + 0.05 * ns * rng.normal()),
                    std::max(0.0, 1.05 * s + 0.05 * ns * rng.normal()),
                    std::max(0.0, 0.95 * s + 0.05 * ns * rng.normal()),
                    std::max(0.0, 0.70 * s + 0.05 * ns * rng.normal())};
        ts.records.push_back(r);
        ts.target.push_back(r.target());

        w_prev = w;
        s_prev = s;
    }
    return ts;
}

}  // namespace deljet
