#include "deljet/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "deljet/errors.hpp"

namespace deljet {

void PredictionSeries::validate() const {
    if (actual.size() != predicted.size())
        throw ShapeMismatch("prediction series lengths differ");
    if (actual.empty()) throw DataError("empty prediction series");
}

double rmse(const PredictionSeries& p) {
    p.validate();
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double e = p.actual[i] - p.predicted[i];
        s += e * e;
    }
    return std::sqrt(s / (double)p.size());
}

double mae(const PredictionSeries& p) {
    p.validate();
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p.actual[i] - p.predicted[i]);
    return s / (double)p.size();
}

double sde(const PredictionSeries& p) { return error_stats(p).sde; }

ErrorStats error_stats(const PredictionSeries& p) {
    p.validate();
    std::size_t m = p.size();
    ErrorStats st;
    double se = 0.0, ae = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double e = p.actual[i] - p.predicted[i];
        se += e * e;
        ae += std::abs(e);
        sum += e;
    }
    st.rmse = std::sqrt(se / (double)m);
    st.mae = ae / (double)m;
    st.bias = sum / (double)m;
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double d = (p.actual[i] - p.predicted[i]) - st.bias;
        var += d * d;
    }
    st.sde = std::sqrt(var / (double)m);
    return st;
}

namespace {
MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd ms;
    for (double x : xs) ms.mean += x;
    ms.mean /= (double)xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - ms.mean) * (x - ms.mean);
    ms.std = std::sqrt(var / (double)xs.size());
    return ms;
}
}  // namespace

AggregateStats aggregate_runs(const std::vector<ErrorStats>& per_run) {
    if (per_run.empty()) throw DataError("aggregate_runs: no runs");
    std::vector<double> r, a, s;
    for (const auto& st : per_run) {
        r.push_back(st.rmse);
        a.push_back(st.mae);
        s.push_back(st.sde);
    }
    return {mean_std(r), mean_std(a), mean_std(s)};
}

std::string format_mean_std(const MeanStd& ms) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.5f±%.5f", ms.mean, ms.std);
    return buf;
}

}  // namespace deljet
