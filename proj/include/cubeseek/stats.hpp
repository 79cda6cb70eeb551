#pragma once

// Exponential and log-normal models of solver running times.
//
// Exponential:  f(t) = lambda e^{-lambda t},       lambda = 1 / mean(t).
// Log-normal:   f(t) = exp(-(ln t - a)^2 / 2b^2) / (b t sqrt(2 pi)),
//               a = mean(ln t), b = sqrt(mean((ln t - a)^2))   (1/N normalisation).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubeseek/bench.hpp"

namespace cubeseek::stats {

/// Two-sided 95% normal quantile used by every interval below.
inline constexpr double kZ95 = 1.96;

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double v) const noexcept { return lower <= v && v <= upper; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct ExpModel {
    double rate = 1.0;  // lambda, 1/s
    std::size_t n = 0;

    friend bool operator==(const ExpModel&, const ExpModel&) = default;
};

struct LogNormalModel {
    double alpha = 0.0;
    double beta = 1.0;
    std::size_t n = 0;

    friend bool operator==(const LogNormalModel&, const LogNormalModel&) = default;
};

struct ExpSummary {
    double mean = 0.0;
    double variance = 0.0;
    double median = 0.0;
    // Present only when n >= 2.
    std::optional<Interval> rate_ci;
    std::optional<Interval> mean_ci;
    std::optional<double> delta_rate;  // |lambda - lambda_upper|
    std::optional<double> delta_mean;  // |mean - 1/lambda_lower|
};

struct LogNormalSummary {
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
    double mode = 0.0;
    Interval scatter68;
    Interval scatter95;
    // Cox interval for the mean; present only when n >= 2.
    std::optional<Interval> mean_ci;
    std::optional<double> delta_mean;  // max distance from mean to the interval ends
};

/// Throws InvalidData on an empty sample or any non-positive time.
ExpModel fit_exponential(std::span<const double> times);
ExpModel fit_exponential(const bench::TimeDataset& ds);

/// Throws InvalidData on non-positive times, DegenerateData when ln t has no spread.
LogNormalModel fit_lognormal(std::span<const double> times);
LogNormalModel fit_lognormal(const bench::TimeDataset& ds);

ExpSummary exp_summary(const ExpModel& m);
LogNormalSummary lognormal_summary(const LogNormalModel& m);

double standard_normal_cdf(double x);
double exp_pdf(const ExpModel& m, double t);
double exp_cdf(const ExpModel& m, double t);
double lognormal_pdf(const LogNormalModel& m, double t);
double lognormal_cdf(const LogNormalModel& m, double t);

/// Both fits of one (algorithm, range) dataset.
struct FittedModels {
    std::string algorithm;
    std::string range;
    ExpModel exponential;
    LogNormalModel lognormal;
};

struct RatioRow {
    std::string range;
    std::string family;       // "exponential" | "lognormal"
    std::string numerator;    // algorithm tags
    std::string denominator;
    double ratio = 0.0;       // mean(numerator) / mean(denominator)
};

struct FastRunProbability {
    std::string algorithm;
    std::string range;
    std::string family;
    double tau = 0.0;
    double probability = 0.0;  // P(t <= tau) under the fitted model
};

struct PerformanceReport {
    std::vector<RatioRow> ratios;
    std::vector<FastRunProbability> fast_runs;
};

/// Mean-time ratios sa/pso, rsa/pso and sa/rsa per range and family (where both sides exist),
/// plus P(t <= tau) for every model and every tau. Needs at least two fitted entries.
PerformanceReport performance_report(const std::vector<FittedModels>& models, const std::vector<double>& taus);

/// Table-style rounding: 3 decimals below 1, 2 decimals up to 100, 1 decimal above.
std::string format_table_value(double v);

nlohmann::json to_json(const ExpModel& m);
nlohmann::json to_json(const LogNormalModel& m);
nlohmann::json to_json(const FittedModels& f);
nlohmann::json to_json(const PerformanceReport& r);
std::string ratio_table_csv(const PerformanceReport& r);

ExpModel exp_model_from_json(const nlohmann::json& j);
LogNormalModel lognormal_model_from_json(const nlohmann::json& j);
FittedModels fitted_models_from_json(const nlohmann::json& j);

/// Two-row text table (parameters, mean +- delta, CI, median, mode).
std::string summary_table(const FittedModels& f);

}  // namespace cubeseek::stats
