#ifndef DELJET_TIMESERIES_HPP
#define DELJET_TIMESERIES_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace deljet {

inline constexpr int kNumFeatures = 8;
inline constexpr std::int64_t kCadenceMinutes = 10;
inline constexpr const char* kCsvHeader =
    "timestamp,wd_mean_78_5,wd_std_78_5,wd_mean_28_5,wd_std_28_5,temp_mean_5,"
    "temp_mean_80,humidity,pressure,ws_81_5,ws_80,ws_60,ws_10";

// One 10-minute observation: 8 meteorological features plus wind speed at
// four heights.
struct RawRecord {
    std::int64_t timestamp = 0;  // minutes since epoch
    std::array<double, kNumFeatures> features{};  // wd_mean_78_5 ... pressure
    std::array<double, 4> speeds{};               // ws_81_5, ws_80, ws_60, ws_10

    double target() const {
        return (speeds[0] + speeds[1] + speeds[2] + speeds[3]) / 4.0;
    }
};

struct TimeSeries {
    std::vector<RawRecord> records;
    std::vector<double> target;  // mean of the four height speeds, per record

    std::size_t size() const { return records.size(); }
};

TimeSeries load_csv(const std::filesystem::path& path);
void write_csv(const TimeSeries& series, const std::filesystem::path& path);

struct SynthConfig {
    std::size_t length = 52560;  // one year at 10-minute cadence
    std::uint64_t seed = 0;
    double noise_std = 1.0;
};

// Deterministic synthetic wind-farm series. The target follows a nonlinear
// autoregressive recurrence with a 144-step diurnal cycle and a slow AR(1)
// weather state w; the features are noisy functions of (w, diurnal) at the
// same step, so lagged features carry predictive signal for future speed.
//
// With d(i) = sin(2*pi*i/144) and state initialised to w(-1) = 0, s(-1) = 5,
// each step i >= 0 draws 14 standard normals from mt19937_64(seed) in this
// order: e_w, e_f1..e_f8, e_s, e_h1..e_h4 (deljet::Rng::normal), and sets
//
//   w(i) = 0.98*w(i-1) + 0.2*noise_std*e_w
//   s(i) = max(0, 5 + 0.6*(s(i-1)-5) + 2.5*tanh(w(i-1)) + 1.2*d(i-1)
//              + 0.3*tanh(s(i-1)-5) + 0.2*noise_std*e_s)
//   features:
//     wd_mean_78_5 = 180 + 60*w + 20*d + n,  wd_std_78_5 = 15 + 5*|w| + n
//     wd_mean_28_5 = 175 + 55*w + n,         wd_std_28_5 = 18 + 4*|w| + n
//     temp_mean_5  = 20 + 8*d + 2*w + n,     temp_mean_80 = 18 + 6*d + 2*w + n
//     humidity     = clamp(60 - 10*d - 5*w + n, 0, 100)
//     pressure     = 1010 + 4*w + n
//   with n = 0.5*noise_std*e_fk, and height speeds
//     ws_81_5 = max(0, 1.08*s + 0.05*noise_std*e_h1)
//     ws_80   = max(0, 1.05*s + 0.05*noise_std*e_h2)
//     ws_60   = max(0, 0.95*s + 0.05*noise_std*e_h3)
//     ws_10   = max(0, 0.70*s + 0.05*noise_std*e_h4)
//
// Timestamps start at 0 and advance by 10 minutes.
TimeSeries synth_generate(const SynthConfig& config);

}  // namespace deljet

#endif
