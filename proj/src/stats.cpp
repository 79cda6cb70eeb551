#include "cubeseek/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "cubeseek/errors.hpp"

namespace cubeseek::stats {

using nlohmann::json;

namespace {

void require_positive(std::span<const double> times) {
    if (times.empty()) throw InvalidData("no completed running times to fit");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0) || !std::isfinite(times[i])) {
            throw InvalidData("running time #" + std::to_string(i) + " is not a positive finite number");
        }
    }
}

json interval_json(const std::optional<Interval>& iv) {
    if (!iv) return nullptr;
    return json::array({iv->lower, iv->upper});
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

ExpModel fit_exponential(std::span<const double> times) {
    require_positive(times);
    double sum = 0.0;
    for (double t : times) sum += t;
    const double mean = sum / static_cast<double>(times.size());
    return {1.0 / mean, times.size()};
}

ExpModel fit_exponential(const bench::TimeDataset& ds) {
    const auto t = ds.times();
    return fit_exponential(std::span<const double>(t));
}

LogNormalModel fit_lognormal(std::span<const double> times) {
    require_positive(times);
    if (times.size() < 2) throw DegenerateData("log-normal fit needs at least two running times");
    const auto n = static_cast<double>(times.size());
    double sum = 0.0;
    for (double t : times) sum += std::log(t);
    const double alpha = sum / n;
    double ss = 0.0;
    for (double t : times) {
        const double d = std::log(t) - alpha;
        ss += d * d;
    }
    const double beta = std::sqrt(ss / n);
    if (!(beta > 0.0)) throw DegenerateData("all running times are equal; log-normal beta would be zero");
    return {alpha, beta, times.size()};
}

LogNormalModel fit_lognormal(const bench::TimeDataset& ds) {
    const auto t = ds.times();
    return fit_lognormal(std::span<const double>(t));
}

ExpSummary exp_summary(const ExpModel& m) {
    if (!(m.rate > 0.0)) throw InvalidArgument("exponential rate must be positive");
    ExpSummary s;
    s.mean = 1.0 / m.rate;
    s.variance = 1.0 / (m.rate * m.rate);
    s.median = std::numbers::ln2 / m.rate;
    if (m.n >= 2) {
        const double half = kZ95 / std::sqrt(static_cast<double>(m.n));
        const Interval rate{m.rate * (1.0 - half), m.rate * (1.0 + half)};
        s.rate_ci = rate;
        s.mean_ci = Interval{1.0 / rate.upper, 1.0 / rate.lower};
        s.delta_rate = std::fabs(m.rate - rate.upper);
        s.delta_mean = std::fabs(s.mean - 1.0 / rate.lower);
    }
    return s;
}

LogNormalSummary lognormal_summary(const LogNormalModel& m) {
    if (!(m.beta > 0.0)) throw InvalidArgument("log-normal beta must be positive");
    const double a = m.alpha;
    const double b = m.beta;
    const double b2 = b * b;
    LogNormalSummary s;
    s.mean = std::exp(a + 0.5 * b2);
    s.sd = s.mean * std::sqrt(std::expm1(b2));
    s.median = std::exp(a);
    s.mode = std::exp(a - b2);
    s.scatter68 = {std::exp(a - b), std::exp(a + b)};
    s.scatter95 = {std::exp(a - 2.0 * b), std::exp(a + 2.0 * b)};
    if (m.n >= 2) {
        const auto n = static_cast<double>(m.n);
        const double half = kZ95 * std::sqrt(b2 / n + b2 * b2 / (2.0 * (n - 1.0)));
        const Interval cox{std::exp(a + 0.5 * b2 - half), std::exp(a + 0.5 * b2 + half)};
        s.mean_ci = cox;
        s.delta_mean = std::max(std::fabs(s.mean - cox.lower), std::fabs(s.mean - cox.upper));
    }
    return s;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double exp_pdf(const ExpModel& m, double t) { return t < 0.0 ? 0.0 : m.rate * std::exp(-m.rate * t); }

double exp_cdf(const ExpModel& m, double t) { return t <= 0.0 ? 0.0 : -std::expm1(-m.rate * t); }

double lognormal_pdf(const LogNormalModel& m, double t) {
    if (t <= 0.0) return 0.0;
    const double z = (std::log(t) - m.alpha) / m.beta;
    return std::exp(-0.5 * z * z) / (m.beta * std::sqrt(2.0 * std::numbers::pi) * t);
}

double lognormal_cdf(const LogNormalModel& m, double t) {
    if (t <= 0.0) return 0.0;
    return standard_normal_cdf((std::log(t) - m.alpha) / m.beta);
}

PerformanceReport performance_report(const std::vector<FittedModels>& models, const std::vector<double>& taus) {
    if (models.size() < 2) throw InvalidArgument("a performance report needs at least two fitted models");
    PerformanceReport report;

    std::vector<std::string> ranges;
    for (const auto& m : models) {
        if (std::find(ranges.begin(), ranges.end(), m.range) == ranges.end()) ranges.push_back(m.range);
    }
    auto find = [&](const std::string& range, const std::string& algo) -> const FittedModels* {
        for (const auto& m : models) {
            if (m.range == range && m.algorithm == algo) return &m;
        }
        return nullptr;
    };
    static const std::pair<const char*, const char*> kPairs[] = {{"sa", "pso"}, {"rsa", "pso"}, {"sa", "rsa"}};
    for (const char* family : {"exponential", "lognormal"}) {
        const bool is_exp = std::string(family) == "exponential";
        for (const auto& range : ranges) {
            for (const auto& [num, den] : kPairs) {
                const auto* a = find(range, num);
                const auto* b = find(range, den);
                if (!a || !b) continue;
                const double ma = is_exp ? exp_summary(a->exponential).mean : lognormal_summary(a->lognormal).mean;
                const double mb = is_exp ? exp_summary(b->exponential).mean : lognormal_summary(b->lognormal).mean;
                report.ratios.push_back({range, family, num, den, ma / mb});
            }
        }
    }
    for (const auto& m : models) {
        for (double tau : taus) {
            report.fast_runs.push_back({m.algorithm, m.range, "exponential", tau, exp_cdf(m.exponential, tau)});
            report.fast_runs.push_back({m.algorithm, m.range, "lognormal", tau, lognormal_cdf(m.lognormal, tau)});
        }
    }
    return report;
}

std::string format_table_value(double v) {
    const double mag = std::fabs(v);
    const int digits = mag < 1.0 ? 3 : (mag <= 100.0 ? 2 : 1);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

json to_json(const ExpModel& m) {
    const auto s = exp_summary(m);
    return {
        {"model", "exponential"},
        {"n", m.n},
        {"params", {{"lambda", m.rate}}},
        {"summary",
         {{"mean", s.mean},
          {"variance", s.variance},
          {"median", s.median},
          {"mode", nullptr},
          {"ci", interval_json(s.mean_ci)},
          {"delta_t", optional_json(s.delta_mean)},
          {"lambda_ci", interval_json(s.rate_ci)},
          {"delta_lambda", optional_json(s.delta_rate)}}},
    };
}

json to_json(const LogNormalModel& m) {
    const auto s = lognormal_summary(m);
    return {
        {"model", "lognormal"},
        {"n", m.n},
        {"params", {{"alpha", m.alpha}, {"beta", m.beta}}},
        {"summary",
         {{"mean", s.mean},
          {"sd", s.sd},
          {"median", s.median},
          {"mode", s.mode},
          {"ci", interval_json(s.mean_ci)},
          {"delta_t", optional_json(s.delta_mean)},
          {"t68", json::array({s.scatter68.lower, s.scatter68.upper})},
          {"t95", json::array({s.scatter95.lower, s.scatter95.upper})}}},
    };
}

json to_json(const FittedModels& f) {
    return {
        {"algorithm", f.algorithm},
        {"range", f.range},
        {"models", json::array({to_json(f.exponential), to_json(f.lognormal)})},
    };
}

json to_json(const PerformanceReport& r) {
    json ratios = json::array();
    for (const auto& row : r.ratios) {
        ratios.push_back({{"range", row.range},
                          {"family", row.family},
                          {"numerator", row.numerator},
                          {"denominator", row.denominator},
                          {"ratio", row.ratio}});
    }
    json fast = json::array();
    for (const auto& p : r.fast_runs) {
        fast.push_back({{"algorithm", p.algorithm},
                        {"range", p.range},
                        {"family", p.family},
                        {"tau", p.tau},
                        {"probability", p.probability}});
    }
    return {{"ratios", ratios}, {"fast_runs", fast}};
}

std::string ratio_table_csv(const PerformanceReport& r) {
    std::ostringstream out;
    out << "range,family,numerator,denominator,ratio\n";
    out.precision(17);
    for (const auto& row : r.ratios) {
        out << row.range << ',' << row.family << ',' << row.numerator << ',' << row.denominator << ',' << row.ratio
            << '\n';
    }
    return out.str();
}

ExpModel exp_model_from_json(const json& j) {
    if (j.at("model") != "exponential") throw InvalidArgument("not an exponential model");
    ExpModel m{j.at("params").at("lambda").get<double>(), j.value("n", std::size_t{0})};
    if (!(m.rate > 0.0)) throw InvalidArgument("exponential rate must be positive");
    return m;
}

LogNormalModel lognormal_model_from_json(const json& j) {
    if (j.at("model") != "lognormal") throw InvalidArgument("not a log-normal model");
    const auto& p = j.at("params");
    LogNormalModel m{p.at("alpha").get<double>(), p.at("beta").get<double>(), j.value("n", std::size_t{0})};
    if (!(m.beta > 0.0)) throw InvalidArgument("log-normal beta must be positive");
    return m;
}

FittedModels fitted_models_from_json(const json& j) {
    FittedModels f;
    f.algorithm = j.at("algorithm").get<std::string>();
    f.range = j.at("range").get<std::string>();
    bool have_exp = false;
    bool have_ln = false;
    for (const auto& m : j.at("models")) {
        if (m.at("model") == "exponential") {
            f.exponential = exp_model_from_json(m);
            have_exp = true;
        } else if (m.at("model") == "lognormal") {
            f.lognormal = lognormal_model_from_json(m);
            have_ln = true;
        }
    }
    if (!have_exp || !have_ln) throw InvalidArgument("fit report must contain both an exponential and a log-normal model");
    return f;
}

std::string summary_table(const FittedModels& f) {
    const auto e = exp_summary(f.exponential);
    const auto l = lognormal_summary(f.lognormal);
    auto ci = [](const std::optional<Interval>& iv) {
        return iv ? "[" + format_table_value(iv->lower) + "," + format_table_value(iv->upper) + "]" : std::string("n/a");
    };
    auto pm = [](double mean, const std::optional<double>& d) {
        return format_table_value(mean) + (d ? " +- " + format_table_value(*d) : std::string());
    };
    char buf[512];
    std::string out = f.algorithm + " in " + f.range + " (N = " + std::to_string(f.exponential.n) + ")\n";
    std::snprintf(buf, sizeof buf, "%-12s %9s %8s %10s %20s %20s %10s %10s\n", "dist.", "alpha", "beta", "lambda",
                  "mean +- dt [s]", "mean 95% [s]", "median", "mode");
    out += buf;
    std::snprintf(buf, sizeof buf, "%-12s %9s %8s %10.4g %20s %20s %10s %10s\n", "exponential", "--", "--",
                  f.exponential.rate, pm(e.mean, e.delta_mean).c_str(), ci(e.mean_ci).c_str(),
                  format_table_value(e.median).c_str(), "--");
    out += buf;
    std::snprintf(buf, sizeof buf, "%-12s %9.3f %8.3f %10s %20s %20s %10s %10s\n", "log-normal", f.lognormal.alpha,
                  f.lognormal.beta, "--", pm(l.mean, l.delta_mean).c_str(), ci(l.mean_ci).c_str(),
                  format_table_value(l.median).c_str(), format_table_value(l.mode).c_str());
    out += buf;
    return out;
}

}  // namespace cubeseek::stats
