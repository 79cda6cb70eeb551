#include "cubeseek/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cubeseek/bench.hpp"
#include "cubeseek/cubes.hpp"
#include "cubeseek/errors.hpp"
#include "cubeseek/infogeo.hpp"
#include "cubeseek/stats.hpp"

namespace cubeseek::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

/// Reported to the user verbatim with exit status 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverOptions {
    std::int64_t k = 2;
    std::string range = "R3";
    std::string algorithm = "pso";
    std::optional<std::uint64_t> seed;
    double threshold = pso::kDefaultThreshold;
    std::optional<std::uint64_t> max_iterations;
    int swarm_size = pso::kDefaultSwarmSize;
    int radius = anneal::kDefaultRadius;
    double cooling_offset = anneal::kDefaultCoolingOffset;
    std::uint64_t rtm = anneal::kDefaultRestartThreshold;
};

void add_solver_options(CLI::App* app, SolverOptions& o) {
    app->add_option("--k", o.k, "Target k in x^3 + y^3 + z^3 = k")->capture_default_str();
    app->add_option("--range", o.range, "R3, R4, R5 or x_min:x_max,y_min:y_max")->capture_default_str();
    app->add_option("--algo", o.algorithm, "pso, sa or rsa")
        ->check(CLI::IsMember({"pso", "sa", "rsa"}))
        ->capture_default_str();
    app->add_option("--seed", o.seed, "Seed (falls back to $CUBESEEK_SEED, then 0)");
    app->add_option("--thr", o.threshold, "Fitness threshold that triggers exact verification")->capture_default_str();
    app->add_option("--max-iterations", o.max_iterations, "Give up after this many iterations");
    app->add_option("--swarm-size", o.swarm_size, "PSO swarm size s")->capture_default_str();
    app->add_option("--radius", o.radius, "SA neighbourhood radius")->capture_default_str();
    app->add_option("--cooling-offset", o.cooling_offset, "SA schedule 1/(ln m + offset)")->capture_default_str();
    app->add_option("--rtm", o.rtm, "rSA restart threshold")->capture_default_str();
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    if (const char* env = std::getenv("CUBESEEK_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw UsageError(std::string("CUBESEEK_SEED is not an unsigned integer: '") + env + "'");
    }
    return 0;
}

bench::SolverConfig make_config(const SolverOptions& o) {
    bench::SolverConfig cfg;
    cfg.algorithm = parse_algorithm(o.algorithm);
    cfg.k = o.k;
    cfg.range = SearchRange::parse(o.range);
    cfg.threshold = o.threshold;
    cfg.max_iterations = o.max_iterations;
    cfg.swarm_size = o.swarm_size;
    cfg.neighbourhood_radius = o.radius;
    cfg.cooling_offset = o.cooling_offset;
    cfg.restart_threshold = o.rtm;
    cfg.validate();
    return cfg;
}

void require_searchable(std::int64_t k) {
    if (validate_k(k) == KVerdict::insoluble) throw InsolubleK(k);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------------------------
// solve

int cmd_solve(const SolverOptions& o, const std::string& format, std::ostream& out) {
    require_searchable(o.k);
    const auto cfg = make_config(o);
    const auto seed = resolve_seed(o.seed);
    const auto rec = bench::run_trial(cfg, seed);

    if (format == "json") {
        json j = {{"algorithm", std::string(to_string(rec.algorithm))},
                  {"k", cfg.k},
                  {"range", cfg.range.tag()},
                  {"seed", seed},
                  {"iterations", rec.iterations},
                  {"restarts", rec.restarts},
                  {"elapsed_seconds", rec.elapsed_seconds},
                  {"truncated", rec.truncated}};
        if (rec.solution) j["solution"] = {{"x", rec.solution->x}, {"y", rec.solution->y}, {"z", rec.solution->z}};
        out << j.dump(2) << "\n";
    } else if (rec.solution) {
        const auto& s = *rec.solution;
        out << "x = " << s.x << "\ny = " << s.y << "\nz = " << s.z << "\n"
            << "verified: (" << s.x << ")^3 + (" << s.y << ")^3 + (" << s.z << ")^3 = " << cfg.k << "\n"
            << "iterations = " << rec.iterations << "\nrestarts = " << rec.restarts
            << "\nelapsed = " << bench::format_seconds(rec.elapsed_seconds) << " s\n";
    } else {
        out << "no solution within " << rec.iterations << " iterations (truncated)\n";
    }
    if (rec.truncated) return kExitTruncated;
    if (!verify_solution(cfg.k, rec.solution->x, rec.solution->y, rec.solution->z)) {
        throw std::logic_error("solver returned an unverified solution");
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------------------------
// bench

int cmd_bench(const SolverOptions& o, std::size_t n, unsigned parallelism, int bins, const fs::path& path,
              std::ostream& out) {
    if (n < 1) throw UsageError("--n must be at least 1");
    require_searchable(o.k);
    const auto cfg = make_config(o);
    const auto ds = bench::run_batch(cfg, n, resolve_seed(o.seed), parallelism);
    bench::save_dataset(ds, path);

    const auto times = ds.times();
    out << "wrote " << ds.size() << " trials to " << path.string() << " (metadata in "
        << bench::sidecar_path(path).string() << ")\n";
    out << "completed " << times.size() << ", truncated " << ds.size() - times.size() << "\n";
    try {
        const auto h = bench::histogram(std::span<const double>(times), bins);
        std::size_t peak = 0;
        for (std::size_t j = 1; j < h.counts.size(); ++j) {
            if (h.counts[j] > h.counts[peak]) peak = j;
        }
        char line[200];
        std::snprintf(line, sizeof line,
                      "histogram: %d bins, dt = %.6g s, range [%.6g, %.6g] s, peak density %.6g at %.6g s\n", bins,
                      h.bin_width, h.edges.front(), h.edges.back(), h.densities[peak], h.centre(peak));
        out << line;
    } catch (const std::exception& e) {
        out << "histogram unavailable: " << e.what() << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------------------------
// fit

std::string summary_csv(const stats::FittedModels& f) {
    const auto e = stats::exp_summary(f.exponential);
    const auto l = stats::lognormal_summary(f.lognormal);
    std::ostringstream s;
    s.precision(17);
    s << "algorithm,range,model,n,lambda,alpha,beta,mean,delta_t,ci_lower,ci_upper,median,mode\n";
    auto opt = [](const std::optional<double>& v) {
        std::ostringstream o;
        o.precision(17);
        if (v) o << *v;
        return o.str();
    };
    s << f.algorithm << ',' << f.range << ",exponential," << f.exponential.n << ',' << f.exponential.rate << ",,,"
      << e.mean << ',' << opt(e.delta_mean) << ',' << opt(e.mean_ci ? std::optional(e.mean_ci->lower) : std::nullopt)
      << ',' << opt(e.mean_ci ? std::optional(e.mean_ci->upper) : std::nullopt) << ',' << e.median << ",\n";
    s << f.algorithm << ',' << f.range << ",lognormal," << f.lognormal.n << ",," << f.lognormal.alpha << ','
      << f.lognormal.beta << ',' << l.mean << ',' << opt(l.delta_mean) << ','
      << opt(l.mean_ci ? std::optional(l.mean_ci->lower) : std::nullopt) << ','
      << opt(l.mean_ci ? std::optional(l.mean_ci->upper) : std::nullopt) << ',' << l.median << ',' << l.mode
      << "\n";
    return s.str();
}

int cmd_fit(const fs::path& dataset, const std::optional<fs::path>& report_path, const std::string& format,
            int bins, const std::optional<fs::path>& plot_path, const std::optional<std::string>& range_label,
            std::ostream& out) {
    const auto ds = bench::load_dataset(dataset);
    stats::FittedModels fitted;
    fitted.algorithm = std::string(to_string(ds.config.algorithm));
    fitted.range = range_label ? *range_label : (ds.config_known ? ds.config.range.tag() : "unknown");
    fitted.exponential = stats::fit_exponential(ds);
    fitted.lognormal = stats::fit_lognormal(ds);

    out << stats::summary_table(fitted);
    if (report_path) {
        write_file(*report_path, format == "csv" ? summary_csv(fitted) : stats::to_json(fitted).dump(2) + "\n");
        out << "report written to " << report_path->string() << "\n";
    }
    if (plot_path) {
        const auto h = bench::histogram(ds, bins);
        std::ostringstream s;
        s.precision(17);
        s << "bin_center,density,fitted_pdf_exponential,fitted_pdf_lognormal\n";
        for (std::size_t j = 0; j < h.densities.size(); ++j) {
            const double c = h.centre(j);
            s << c << ',' << h.densities[j] << ',' << stats::exp_pdf(fitted.exponential, c) << ','
              << stats::lognormal_pdf(fitted.lognormal, c) << '\n';
        }
        write_file(*plot_path, s.str());
        out << "plot data written to " << plot_path->string() << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------------------------
// distance

struct LabelledPoint {
    std::string label;
    infogeo::ModelPoint point;
};

std::vector<LabelledPoint> load_points(const fs::path& path, const std::optional<std::string>& family) {
    const json j = read_json(path);
    std::vector<LabelledPoint> found;
    auto add = [&](const json& m, const std::string& label) {
        const auto kind = m.at("model").get<std::string>();
        if (kind == "exponential") {
            found.push_back({label, infogeo::ModelPoint::exponential(stats::exp_model_from_json(m).rate)});
        } else if (kind == "lognormal") {
            const auto ln = stats::lognormal_model_from_json(m);
            found.push_back({label, infogeo::ModelPoint::lognormal(ln.alpha, ln.beta)});
        } else {
            throw InvalidData(path.string() + ": unknown model '" + kind + "'");
        }
    };
    if (j.contains("models")) {
        // A fit report holds both families; pick the requested one.
        if (!family) throw UsageError(path.string() + " holds several models; choose one with --family");
        const auto label = j.value("algorithm", path.stem().string());
        for (const auto& m : j.at("models")) {
            if (m.at("model") == *family) add(m, label);
        }
        if (found.empty()) throw UsageError(path.string() + " has no " + *family + " model");
    } else {
        add(j, j.value("label", j.value("algorithm", path.stem().string())));
        if (family && infogeo::to_string(found.front().point.family) != *family) {
            throw UsageError(path.string() + " is a " + infogeo::to_string(found.front().point.family) +
                             " model, not " + *family);
        }
    }
    return found;
}

int cmd_distance(const std::vector<fs::path>& files, const std::optional<std::string>& family,
                 const std::string& method, const std::optional<fs::path>& out_path, const std::string& format,
                 std::ostream& out) {
    std::vector<LabelledPoint> points;
    for (const auto& f : files) {
        for (auto& p : load_points(f, family)) points.push_back(std::move(p));
    }
    std::vector<infogeo::ModelPoint> models;
    std::vector<std::string> labels;
    for (const auto& p : points) {
        models.push_back(p.point);
        labels.push_back(p.label);
    }
    const auto lognormal_method =
        method == "closed-form" ? infogeo::LognormalMethod::closed_form : infogeo::LognormalMethod::shooting;
    const auto matrix = infogeo::distance_matrix(models, lognormal_method);
    const auto fam = models.front().family;

    json j = {{"family", infogeo::to_string(fam)}, {"labels", labels}, {"matrix", matrix}};
    json index = json::object();
    json pairs = json::object();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        index[std::to_string(i + 1)] = labels[i];
        for (std::size_t k = i + 1; k < labels.size(); ++k) {
            pairs["L" + std::to_string(i + 1) + std::to_string(k + 1)] = matrix[i][k];
        }
    }
    j["index"] = index;
    j["pairs"] = pairs;

    if (fam == infogeo::Family::lognormal) {
        const auto closed = infogeo::distance_matrix(models, infogeo::LognormalMethod::closed_form);
        const auto bvp = infogeo::distance_matrix(models, infogeo::LognormalMethod::shooting);
        double worst = 0.0;
        double endpoint = 0.0;
        for (std::size_t i = 0; i < models.size(); ++i) {
            for (std::size_t k = i + 1; k < models.size(); ++k) {
                worst = std::max(worst, std::fabs(bvp[i][k] - closed[i][k]));
                endpoint = std::max(endpoint, infogeo::lognormal_geodesic(models[i], models[k]).residual);
            }
        }
        j["method"] = method;
        j["closed_form_matrix"] = closed;
        j["bvp_vs_closed_form_max_abs"] = worst;
        j["bvp_max_endpoint_residual"] = endpoint;
    }

    out << infogeo::to_string(fam) << " Fisher-Rao distances\n";
    char buf[64];
    out << "        ";
    for (const auto& l : labels) {
        std::snprintf(buf, sizeof buf, "%10s", l.c_str());
        out << buf;
    }
    out << "\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%-8s", labels[i].c_str());
        out << buf;
        for (double v : matrix[i]) {
            std::snprintf(buf, sizeof buf, "%10.4f", v);
            out << buf;
        }
        out << "\n";
    }
    if (j.contains("bvp_vs_closed_form_max_abs")) {
        out << "boundary-value vs closed form: max |difference| = " << j["bvp_vs_closed_form_max_abs"].get<double>()
            << ", max endpoint residual = " << j["bvp_max_endpoint_residual"].get<double>() << "\n";
    }

    if (out_path) {
        if (format == "csv") {
            std::ostringstream s;
            s.precision(17);
            s << "model";
            for (const auto& l : labels) s << ',' << l;
            s << '\n';
            for (std::size_t i = 0; i < labels.size(); ++i) {
                s << labels[i];
                for (double v : matrix[i]) s << ',' << v;
                s << '\n';
            }
            write_file(*out_path, s.str());
        } else {
            write_file(*out_path, j.dump(2) + "\n");
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------------------------
// report

int cmd_report(const std::vector<fs::path>& files, const std::vector<double>& taus,
               const std::optional<fs::path>& json_path, const std::optional<fs::path>& csv_path,
               std::ostream& out) {
    std::vector<stats::FittedModels> models;
    for (const auto& f : files) {
        try {
            models.push_back(stats::fitted_models_from_json(read_json(f)));
        } catch (const json::exception& e) {
            throw std::runtime_error(f.string() + ": " + e.what());
        }
    }
    const auto report = stats::performance_report(models, taus);

    out << "relative performance (ratio of mean running times)\n";
    char buf[160];
    for (const auto& r : report.ratios) {
        std::snprintf(buf, sizeof buf, "  %-12s %-4s t_%s / t_%s = %.1f (%.6g)\n", r.family.c_str(), r.range.c_str(),
                      r.numerator.c_str(), r.denominator.c_str(), r.ratio, r.ratio);
        out << buf;
    }
    out << "probability of a fast run P(t <= tau)\n";
    for (const auto& p : report.fast_runs) {
        std::snprintf(buf, sizeof buf, "  %-4s %-4s %-12s tau = %-8g P = %.6g\n", p.algorithm.c_str(), p.range.c_str(),
                      p.family.c_str(), p.tau, p.probability);
        out << buf;
    }
    if (json_path) write_file(*json_path, stats::to_json(report).dump(2) + "\n");
    if (csv_path) write_file(*csv_path, stats::ratio_table_csv(report));
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Search for x^3 + y^3 + z^3 = k with stochastic heuristics and model their running times",
                 "cubeseek"};
    app.require_subcommand(1);

    SolverOptions solve_opts;
    std::string solve_format = "text";
    auto* solve = app.add_subcommand("solve", "Run one seeded trial and print the verified solution");
    add_solver_options(solve, solve_opts);
    solve->add_option("--format", solve_format, "text or json")->check(CLI::IsMember({"text", "json"}));

    SolverOptions bench_opts;
    std::size_t bench_n = 0;
    unsigned parallelism = 1;
    int bench_bins = bench::kDefaultBins;
    std::string bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "Run a seeded batch and write a time dataset");
    add_solver_options(bench_cmd, bench_opts);
    bench_cmd->add_option("--n", bench_n, "Number of trials")->required();
    bench_cmd->add_option("--parallelism", parallelism, "Concurrent trials")->capture_default_str();
    bench_cmd->add_option("--bins", bench_bins, "Histogram partition")->capture_default_str();
    bench_cmd->add_option("--out", bench_out, "CSV output path (sidecar JSON written next to it)")->required();

    std::string fit_in;
    std::optional<std::string> fit_out;
    std::string fit_format = "json";
    int fit_bins = bench::kDefaultBins;
    std::optional<std::string> plot_out;
    std::optional<std::string> fit_range;
    auto* fit = app.add_subcommand("fit", "Fit exponential and log-normal models to a dataset");
    fit->add_option("dataset", fit_in, "Dataset CSV")->required();
    fit->add_option("--out", fit_out, "Report path");
    fit->add_option("--format", fit_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    fit->add_option("--bins", fit_bins, "Histogram partition for --emit-plot-data")->capture_default_str();
    fit->add_option("--emit-plot-data", plot_out, "Write bin centres, densities and fitted PDFs as CSV");
    fit->add_option("--range-tag", fit_range, "Range label when the dataset has no sidecar");

    std::vector<std::string> dist_files;
    std::optional<std::string> dist_family;
    std::string dist_method = "shooting";
    std::optional<std::string> dist_out;
    std::string dist_format = "json";
    auto* distance = app.add_subcommand("distance", "Fisher-Rao distances between fitted models");
    distance->add_option("models", dist_files, "Model or fit-report JSON files")->required();
    distance->add_option("--family", dist_family, "exponential or lognormal")
        ->check(CLI::IsMember({"exponential", "lognormal"}));
    distance->add_option("--method", dist_method, "Log-normal method: shooting or closed-form")
        ->check(CLI::IsMember({"shooting", "closed-form"}));
    distance->add_option("--out", dist_out, "Distance matrix output path");
    distance->add_option("--format", dist_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    std::vector<std::string> report_files;
    std::vector<double> taus{1.5};
    std::optional<std::string> report_json;
    std::optional<std::string> report_csv;
    auto* report = app.add_subcommand("report", "Relative performance and fast-run probabilities");
    report->add_option("reports", report_files, "Fit-report JSON files")->required();
    report->add_option("--tau", taus, "Time thresholds for P(t <= tau)")->capture_default_str();
    report->add_option("--out", report_json, "JSON report path");
    report->add_option("--csv", report_csv, "Ratio table CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    auto opt_path = [](const std::optional<std::string>& s) {
        return s ? std::optional<fs::path>(*s) : std::optional<fs::path>();
    };
    try {
        if (*solve) return cmd_solve(solve_opts, solve_format, out);
        if (*bench_cmd) return cmd_bench(bench_opts, bench_n, parallelism, bench_bins, bench_out, out);
        if (*fit) return cmd_fit(fit_in, opt_path(fit_out), fit_format, fit_bins, opt_path(plot_out), fit_range, out);
        if (*distance) {
            return cmd_distance({dist_files.begin(), dist_files.end()}, dist_family, dist_method, opt_path(dist_out),
                                dist_format, out);
        }
        if (*report) {
            return cmd_report({report_files.begin(), report_files.end()}, taus, opt_path(report_json),
                              opt_path(report_csv), out);
        }
    } catch (const InsolubleK& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace cubeseek::cli
