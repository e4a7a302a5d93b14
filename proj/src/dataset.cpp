#include "deljet/dataset.hpp"

#include <cmath>

#include "deljet/errors.hpp"

namespace deljet {

void LagSpec::validate() const {
    if (step_minutes <= 0) throw ConfigError("lag step_minutes must be > 0");
}

Tensor LagDataset::flat_batch(std::size_t start, std::size_t count) const {
    if (start + count > size()) throw IndexOutOfRange("flat_batch out of range");
    Tensor t({count, X.cols});
    std::copy(X.row(start), X.row(start) + count * X.cols, t.data());
    return t;
}

Tensor LagDataset::target_batch(std::size_t start, std::size_t count) const {
    if (start + count > size()) throw IndexOutOfRange("target_batch out of range");
    Tensor t({count, 1});
    std::copy(y.begin() + start, y.begin() + start + count, t.data());
    return t;
}

Tensor LagDataset::grid_batch(std::size_t start, std::size_t count) const {
    if (start + count > size()) throw IndexOutOfRange("grid_batch out of range");
    std::size_t gr = spec.grid_rows(), gc = LagSpec::grid_cols();
    Tensor t({count, 1, gr, gc});
    for (std::size_t i = 0; i < count; ++i) {
        const double* row = X.row(start + i);
        double* g = t.data() + i * gr * gc;
        // Oldest lag first: grid row r holds lag k = num_lags - r.
        for (std::size_t r = 0; r < gr; ++r) {
            std::size_t k = spec.num_lags - r;
            if (k == 0) {
                for (int f = 0; f < kNumFeatures; ++f) g[r * gc + f] = row[f];
                g[r * gc + kNumFeatures] = 0.0;  // unknown current-time speed
            } else {
                const double* lag = row + kNumFeatures + (k - 1) * (kNumFeatures + 1);
                for (int f = 0; f <= kNumFeatures; ++f) g[r * gc + f] = lag[f];
            }
        }
    }
    return t;
}

LagDataset build_lag_matrix(const TimeSeries& series, const LagSpec& spec) {
    spec.validate();
    if (series.size() <= spec.num_lags)
        throw SeriesTooShort("series of " + std::to_string(series.size()) +
                             " records cannot support " + std::to_string(spec.num_lags) +
                             " lags");
    std::size_t n = series.size() - spec.num_lags;
    LagDataset ds;
    ds.spec = spec;
    ds.X = Matrix(n, spec.flat_width());
    ds.y.resize(n);
    ds.timestamps.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = i + spec.num_lags;  // record index of the current time
        double* row = ds.X.row(i);
        for (int f = 0; f < kNumFeatures; ++f) row[f] = series.records[r].features[f];
        for (std::size_t k = 1; k <= spec.num_lags; ++k) {
            double* cell = row + kNumFeatures + (k - 1) * (kNumFeatures + 1);
            const auto& rec = series.records[r - k];
            for (int f = 0; f < kNumFeatures; ++f) cell[f] = rec.features[f];
            cell[kNumFeatures] = series.target[r - k];
        }
        ds.y[i] = series.target[r];
        ds.timestamps[i] = series.records[r].timestamp;
    }
    return ds;
}

namespace {
double scale_value(double v, double lo, double hi) {
    if (hi == lo) return 0.0;
    return (v - lo) / (hi - lo);
}
}  // namespace

double MinMaxScaler::scale_target(double v) const { return scale_value(v, y_min, y_max); }

double MinMaxScaler::invert_target(double v) const {
    if (y_max == y_min) return y_min;
    return y_min + v * (y_max - y_min);
}

MinMaxScaler fit_scaler(const LagDataset& train) {
    if (train.size() == 0) throw DataError("cannot fit scaler on empty dataset");
    MinMaxScaler sc;
    sc.col_min.assign(train.X.cols, 0.0);
    sc.col_max.assign(train.X.cols, 0.0);
    for (std::size_t c = 0; c < train.X.cols; ++c) {
        double lo = train.X.at(0, c), hi = lo;
        for (std::size_t r = 1; r < train.X.rows; ++r) {
            double v = train.X.at(r, c);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        sc.col_min[c] = lo;
        sc.col_max[c] = hi;
    }
    sc.y_min = sc.y_max = train.y[0];
    for (double v : train.y) {
        sc.y_min = std::min(sc.y_min, v);
        sc.y_max = std::max(sc.y_max, v);
    }
    return sc;
}

LagDataset apply_scaler(const MinMaxScaler& scaler, const LagDataset& data) {
    if (scaler.col_min.size() != data.X.cols)
        throw ShapeMismatch("scaler width does not match dataset");
    LagDataset out = data;
    for (std::size_t r = 0; r < out.X.rows; ++r)
        for (std::size_t c = 0; c < out.X.cols; ++c)
            out.X.at(r, c) = scale_value(data.X.at(r, c), scaler.col_min[c],
                                         scaler.col_max[c]);
    for (auto& v : out.y) v = scaler.scale_target(v);
    return out;
}

std::vector<double> invert_target(const MinMaxScaler& scaler,
                                  const std::vector<double>& values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(scaler.invert_target(v));
    return out;
}

void SplitFractions::validate() const {
    if (train <= 0 || val <= 0 || test <= 0)
        throw ConfigError("split fractions must be positive");
    if (std::abs(train + val + test - 1.0) > 1e-9)
        throw ConfigError("split fractions must sum to 1");
}

namespace {
LagDataset take_rows(const LagDataset& d, std::size_t start, std::size_t count) {
    LagDataset out;
    out.spec = d.spec;
    out.X = Matrix(count, d.X.cols);
    std::copy(d.X.row(start), d.X.row(start) + count * d.X.cols, out.X.v.begin());
    out.y.assign(d.y.begin() + start, d.y.begin() + start + count);
    out.timestamps.assign(d.timestamps.begin() + start,
                          d.timestamps.begin() + start + count);
    return out;
}
}  // namespace

ChronoSplit chrono_split(const LagDataset& data, const SplitFractions& fractions) {
    fractions.validate();
    std::size_t n = data.size();
    std::size_t n_train = (std::size_t)std::llround((double)n * fractions.train);
    std::size_t n_val = (std::size_t)std::llround((double)n * fractions.val);
    if (n_train + n_val >= n) throw EmptySplit("test split would be empty");
    std::size_t n_test = n - n_train - n_val;
    if (n_train == 0 || n_val == 0 || n_test == 0)
        throw EmptySplit("a split would be empty");
    ChronoSplit s;
    s.train = take_rows(data, 0, n_train);
    s.val = take_rows(data, n_train, n_val);
    s.test = take_rows(data, n_train + n_val, n_test);
    return s;
}

}  // namespace deljet
