#ifndef DELJET_DATASET_HPP
#define DELJET_DATASET_HPP

#include "deljet/tensor.hpp"
#include "deljet/timeseries.hpp"

namespace deljet {

struct LagSpec {
    std::int64_t step_minutes = kCadenceMinutes;
    std::size_t num_lags = 7;

    void validate() const;
    // 8 current features plus (features + speed) per lag.
    std::size_t flat_width() const { return kNumFeatures + num_lags * (kNumFeatures + 1); }
    std::size_t grid_rows() const { return num_lags + 1; }
    static constexpr std::size_t grid_cols() { return kNumFeatures + 1; }
};

// Supervised lag lattice. X row layout: current 8 features, then for each lag
// k = 1..num_lags the 8 features and the speed at t - 10k. The grid view is
// (num_lags+1) x 9, timesteps oldest-first, columns = features then speed,
// with the current-time speed cell fixed at 0.
struct LagDataset {
    LagSpec spec;
    Matrix X;
    std::vector<double> y;
    std::vector<std::int64_t> timestamps;

    std::size_t size() const { return X.rows; }

    // Grid view of rows [start, start+count) as a {count, 1, rows, 9} tensor.
    Tensor grid_batch(std::size_t start, std::size_t count) const;
    Tensor flat_batch(std::size_t start, std::size_t count) const;
    Tensor target_batch(std::size_t start, std::size_t count) const;
};

LagDataset build_lag_matrix(const TimeSeries& series, const LagSpec& spec);

// Per-column min-max over X plus the target, fitted on training rows only.
// A degenerate column (max == min) scales to 0.
struct MinMaxScaler {
    std::vector<double> col_min, col_max;  // X columns
    double y_min = 0.0, y_max = 0.0;

    double scale_target(double v) const;
    double invert_target(double v) const;
};

MinMaxScaler fit_scaler(const LagDataset& train);
LagDataset apply_scaler(const MinMaxScaler& scaler, const LagDataset& data);
std::vector<double> invert_target(const MinMaxScaler& scaler,
                                  const std::vector<double>& values);

struct SplitFractions {
    double train = 0.6667, val = 0.1667, test = 0.1666;
    void validate() const;
};

struct ChronoSplit {
    LagDataset train, val, test;
};

// Contiguous prefix/middle/suffix split; train and val sizes are
// round(N*fraction) and the remainder goes to test.
ChronoSplit chrono_split(const LagDataset& data, const SplitFractions& fractions);

}  // namespace deljet

#endif
