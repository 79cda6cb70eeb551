#include "cubeseek/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "cubeseek/errors.hpp"

namespace cubeseek::bench {

using nlohmann::json;

pso::SwarmConfig SolverConfig::swarm() const {
    pso::SwarmConfig c;
    c.k = k;
    c.range = range;
    c.swarm_size = swarm_size;
    c.threshold = threshold;
    c.max_iterations = max_iterations;
    return c;
}

anneal::AnnealConfig SolverConfig::annealing() const {
    anneal::AnnealConfig c;
    c.k = k;
    c.range = range;
    c.threshold = threshold;
    c.neighbourhood_radius = neighbourhood_radius;
    c.cooling_offset = cooling_offset;
    if (algorithm == Algorithm::rsa) c.restart_threshold = restart_threshold;
    c.max_iterations = max_iterations;
    return c;
}

void SolverConfig::validate() const {
    if (algorithm == Algorithm::pso) {
        swarm().validate();
    } else {
        annealing().validate();
    }
}

json SolverConfig::to_json() const {
    json j = {
        {"algorithm", std::string(to_string(algorithm))},
        {"k", k},
        {"range", range.tag()},
        {"threshold", threshold},
        {"max_iterations", max_iterations ? json(*max_iterations) : json(nullptr)},
        {"swarm_size", swarm_size},
        {"dispersion_parameter", swarm().dispersion_parameter()},
        {"neighbourhood_radius", neighbourhood_radius},
        {"cooling_offset", cooling_offset},
        {"restart_threshold", restart_threshold},
    };
    return j;
}

SolverConfig SolverConfig::from_json(const json& j) {
    SolverConfig c;
    c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    c.k = j.at("k").get<std::int64_t>();
    c.range = SearchRange::parse(j.at("range").get<std::string>());
    c.threshold = j.at("threshold").get<double>();
    if (!j.at("max_iterations").is_null()) c.max_iterations = j.at("max_iterations").get<std::uint64_t>();
    c.swarm_size = j.at("swarm_size").get<int>();
    c.neighbourhood_radius = j.at("neighbourhood_radius").get<int>();
    c.cooling_offset = j.at("cooling_offset").get<double>();
    c.restart_threshold = j.at("restart_threshold").get<std::uint64_t>();
    return c;
}

std::vector<double> TimeDataset::times() const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (!r.truncated) out.push_back(r.elapsed_seconds);
    }
    return out;
}

TrialRecord run_trial(const SolverConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    switch (cfg.algorithm) {
        case Algorithm::pso: return pso::run(cfg.swarm(), rng);
        case Algorithm::sa: return anneal::run_sa(cfg.annealing(), rng);
        case Algorithm::rsa: return anneal::run_rsa(cfg.annealing(), rng);
    }
    throw InvalidArgument("unknown algorithm");
}

TimeDataset run_batch(const SolverConfig& cfg, std::size_t n, std::uint64_t base_seed, unsigned parallelism) {
    if (n < 1) throw InvalidArgument("a batch needs at least one trial");
    cfg.validate();

    TimeDataset ds;
    ds.config = cfg;
    ds.base_seed = base_seed;
    ds.records.resize(n);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::optional<std::size_t> error_trial;
    std::string error_text;

    auto worker = [&] {
        for (;;) {
            if (failed.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                ds.records[i] = run_trial(cfg, Rng::for_trial(base_seed, i).seed());
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (!error_trial || i < *error_trial) {
                    error_trial = i;
                    error_text = e.what();
                }
                failed.store(true);
            }
        }
    };

    const unsigned threads = std::clamp<unsigned>(parallelism, 1, static_cast<unsigned>(std::min<std::size_t>(n, 256)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (error_trial) throw BatchError(*error_trial, error_text);
    return ds;
}

Histogram histogram(std::span<const double> times, int bins) {
    if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
    if (static_cast<std::size_t>(bins) >= times.size()) {
        throw InvalidArgument("partition must be smaller than the sample size (" + std::to_string(bins) +
                              " >= " + std::to_string(times.size()) + ")");
    }
    const auto [lo_it, hi_it] = std::minmax_element(times.begin(), times.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) throw DegenerateData("all running times are equal; histogram width would be zero");

    Histogram h;
    h.bin_width = (hi - lo) / bins;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int j = 0; j <= bins; ++j) h.edges[static_cast<std::size_t>(j)] = lo + j * h.bin_width;
    h.edges.back() = hi;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double t : times) {
        auto j = static_cast<std::size_t>(std::floor((t - lo) / h.bin_width));
        h.counts[std::min(j, h.counts.size() - 1)] += 1;
    }
    const double norm = static_cast<double>(times.size()) * h.bin_width;
    h.densities.resize(h.counts.size());
    for (std::size_t j = 0; j < h.counts.size(); ++j) h.densities[j] = static_cast<double>(h.counts[j]) / norm;
    return h;
}

Histogram histogram(const TimeDataset& ds, int bins) {
    const auto t = ds.times();
    return histogram(std::span<const double>(t), bins);
}

std::string format_seconds(double seconds) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, seconds, std::chars_format::fixed);
    if (ec != std::errc{}) throw InvalidArgument("cannot format time value");
    std::string s(buf, end);
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        s += '.';
        dot = s.size() - 1;
    }
    const std::size_t frac = s.size() - dot - 1;
    if (frac < 6) s.append(6 - frac, '0');
    return s;
}

std::string to_csv(const TimeDataset& ds) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const auto& r = ds.records[i];
        out += std::to_string(i) + "," + std::string(to_string(r.algorithm)) + "," + std::to_string(r.seed) + "," +
               format_seconds(r.elapsed_seconds) + "," + std::to_string(r.iterations) + "," +
               std::to_string(r.restarts) + ",";
        if (r.solution) {
            out += std::to_string(r.solution->x) + "," + std::to_string(r.solution->y) + "," +
                   std::to_string(r.solution->z);
        } else {
            out += ",,";
        }
        out += r.truncated ? ",1\n" : ",0\n";
    }
    return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) return out;
        start = comma + 1;
    }
}

template <typename T>
T parse_field(std::string_view text, const char* name, std::size_t line) {
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("bad " + std::string(name) + " value '" + std::string(text) + "'", line);
    }
    return v;
}

// The file does not store k; each solution row determines it.
std::int64_t row_k(const Solution& s, std::size_t line) {
    constexpr std::int64_t kLimit = 10 * kCoordinateCap;
    for (auto v : {s.x, s.y, s.z}) {
        if (v > kLimit || v < -kLimit) throw ParseError("solution coordinate out of range", line);
    }
    const auto cube = [](std::int64_t v) { return static_cast<int128>(v) * v * v; };
    const int128 k = cube(s.x) + cube(s.y) + cube(s.z);
    if (k > INT64_MAX || k < INT64_MIN) throw ParseError("solution sum does not fit a 64-bit k", line);
    return static_cast<std::int64_t>(k);
}

}  // namespace

TimeDataset parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty dataset file", 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw ParseError("expected header '" + std::string(kCsvHeader) + "'", line_no);

    TimeDataset ds;
    std::optional<std::int64_t> seen_k;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 10) {
            throw ParseError("expected 10 fields, found " + std::to_string(f.size()), line_no);
        }
        const auto trial = parse_field<std::size_t>(f[0], "trial", line_no);
        if (trial != ds.records.size()) throw ParseError("trial indices must be consecutive from 0", line_no);

        TrialRecord r;
        try {
            r.algorithm = parse_algorithm(f[1]);
        } catch (const InvalidArgument& e) {
            throw ParseError(e.what(), line_no);
        }
        r.seed = parse_field<std::uint64_t>(f[2], "seed", line_no);
        r.elapsed_seconds = parse_field<double>(f[3], "time_seconds", line_no);
        r.iterations = parse_field<std::uint64_t>(f[4], "iterations", line_no);
        r.restarts = parse_field<std::uint64_t>(f[5], "restarts", line_no);
        if (f[9] != "0" && f[9] != "1") throw ParseError("truncated must be 0 or 1", line_no);
        r.truncated = f[9] == "1";
        const bool has_xyz = !f[6].empty() || !f[7].empty() || !f[8].empty();
        if (r.truncated == has_xyz) {
            throw ParseError(r.truncated ? "truncated trial carries a solution" : "completed trial lacks a solution",
                             line_no);
        }
        if (has_xyz) {
            Solution s;
            s.x = parse_field<std::int64_t>(f[6], "x", line_no);
            s.y = parse_field<std::int64_t>(f[7], "y", line_no);
            s.z = parse_field<std::int64_t>(f[8], "z", line_no);
            s.k = row_k(s, line_no);
            if (seen_k && *seen_k != s.k) throw ParseError("solutions disagree on k", line_no);
            seen_k = s.k;
            r.solution = s;
        }
        if (!ds.records.empty() && r.algorithm != ds.records.front().algorithm) {
            throw ParseError("all trials of a dataset must use the same algorithm", line_no);
        }
        ds.records.push_back(r);
    }
    if (ds.records.empty()) throw ParseError("dataset has no trials", line_no);
    ds.config.algorithm = ds.records.front().algorithm;
    if (seen_k) ds.config.k = *seen_k;
    ds.config_known = false;
    ds.base_seed = ds.records.front().seed;
    return ds;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".meta.json");
    return p;
}

void save_dataset(const TimeDataset& ds, const std::filesystem::path& path) {
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << to_csv(ds);
        if (!out) throw std::runtime_error("write failed for " + path.string());
    }
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    const json meta = {
        {"format", "cubeseek-dataset"},
        {"version", 1},
        {"csv", path.filename().string()},
        {"k", ds.config.k},
        {"range", ds.config.range.tag()},
        {"n", ds.records.size()},
        {"completed", ds.times().size()},
        {"base_seed", ds.base_seed},
        {"config", ds.config.to_json()},
        {"timing", "steady_clock around the solver loop, seconds"},
        {"created_utc", stamp},
    };
    const auto side = sidecar_path(path);
    std::ofstream out(side);
    if (!out) throw std::runtime_error("cannot write " + side.string());
    out << meta.dump(2) << "\n";
}

TimeDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    TimeDataset ds = parse_csv(buf.str());

    const auto side = sidecar_path(path);
    if (std::filesystem::exists(side)) {
        std::ifstream sin(side);
        try {
            const json meta = json::parse(sin);
            ds.config = SolverConfig::from_json(meta.at("config"));
            ds.base_seed = meta.at("base_seed").get<std::uint64_t>();
            ds.config_known = true;
        } catch (const json::exception& e) {
            throw ParseError(side.string() + ": " + e.what(), 1);
        }
        if (ds.config.algorithm != ds.records.front().algorithm) {
            throw ParseError(side.string() + ": algorithm disagrees with the CSV rows", 1);
        }
        for (const auto& r : ds.records) {
            if (r.solution && r.solution->k != ds.config.k) {
                throw ParseError(side.string() + ": k disagrees with the CSV rows", 1);
            }
        }
    }
    return ds;
}

}  // namespace cubeseek::bench
