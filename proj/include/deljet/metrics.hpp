#ifndef DELJET_METRICS_HPP
#define DELJET_METRICS_HPP

#include <string>
#include <vector>

namespace deljet {

struct PredictionSeries {
    std::vector<double> actual;
    std::vector<double> predicted;

    void validate() const;
    std::size_t size() const { return actual.size(); }
};

// RMSE >= MAE always, and rmse^2 = bias^2 + sde^2 (signed-error convention,
// population variance).
struct ErrorStats {
    double rmse = 0.0;
    double mae = 0.0;
    double sde = 0.0;
    double bias = 0.0;  // mean signed error, actual - predicted
};

double rmse(const PredictionSeries& p);
double mae(const PredictionSeries& p);
double sde(const PredictionSeries& p);
ErrorStats error_stats(const PredictionSeries& p);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population
};

struct AggregateStats {
    MeanStd rmse, mae, sde;
};

AggregateStats aggregate_runs(const std::vector<ErrorStats>& per_run);

// "0.02465±0.00073" style cell.
std::string format_mean_std(const MeanStd& ms);

}  // namespace deljet

#endif
