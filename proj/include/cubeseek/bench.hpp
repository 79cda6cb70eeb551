#pragma once

// Seeded batch harness, histogramming and dataset persistence.
//
// Dataset files are a CSV with the header
//   trial,algorithm,seed,time_seconds,iterations,restarts,x,y,z,truncated
// plus a JSON sidecar (same stem, .meta.json) carrying the solver configuration.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubeseek/anneal.hpp"
#include "cubeseek/pso.hpp"
#include "cubeseek/trial.hpp"

namespace cubeseek::bench {

inline constexpr int kDefaultBins = 50;
inline constexpr const char* kCsvHeader = "trial,algorithm,seed,time_seconds,iterations,restarts,x,y,z,truncated";

/// Everything needed to reproduce a trial of any of the three solvers.
struct SolverConfig {
    Algorithm algorithm = Algorithm::pso;
    std::int64_t k = 2;
    SearchRange range = SearchRange::decade(3);
    double threshold = pso::kDefaultThreshold;
    std::optional<std::uint64_t> max_iterations;
    int swarm_size = pso::kDefaultSwarmSize;
    int neighbourhood_radius = anneal::kDefaultRadius;
    double cooling_offset = anneal::kDefaultCoolingOffset;
    std::uint64_t restart_threshold = anneal::kDefaultRestartThreshold;

    pso::SwarmConfig swarm() const;
    anneal::AnnealConfig annealing() const;
    void validate() const;

    nlohmann::json to_json() const;
    static SolverConfig from_json(const nlohmann::json& j);

    friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct TimeDataset {
    SolverConfig config;
    std::uint64_t base_seed = 0;
    std::vector<TrialRecord> records;
    /// False when loaded from a CSV without its sidecar; config then only knows the algorithm.
    bool config_known = true;

    std::size_t size() const noexcept { return records.size(); }
    /// Running times of the completed (non-truncated) trials, in trial order.
    std::vector<double> times() const;

    friend bool operator==(const TimeDataset&, const TimeDataset&) = default;
};

struct Histogram {
    double bin_width = 0.0;
    std::vector<double> edges;       // bins + 1 entries
    std::vector<std::size_t> counts;
    std::vector<double> densities;   // count / (N * width)

    double centre(std::size_t bin) const { return 0.5 * (edges[bin] + edges[bin + 1]); }
};

/// A batch aborted because one trial threw; `trial()` is its index.
struct BatchError : std::runtime_error {
    BatchError(std::size_t trial, const std::string& what)
        : std::runtime_error("trial " + std::to_string(trial) + ": " + what), trial_(trial) {}
    std::size_t trial() const noexcept { return trial_; }

private:
    std::size_t trial_;
};

/// One trial of cfg.algorithm with a fresh stream seeded by `seed`.
TrialRecord run_trial(const SolverConfig& cfg, std::uint64_t seed);

/// n trials with seeds base_seed + i, up to `parallelism` at a time; records in trial order.
TimeDataset run_batch(const SolverConfig& cfg, std::size_t n, std::uint64_t base_seed, unsigned parallelism = 1);

/// Equal-width bins of width (max - min) / bins; the last bin includes its right edge.
Histogram histogram(std::span<const double> times, int bins = kDefaultBins);
Histogram histogram(const TimeDataset& ds, int bins = kDefaultBins);

/// Shortest round-trip decimal with at least six fractional digits.
std::string format_seconds(double seconds);

std::string to_csv(const TimeDataset& ds);
/// Parses CSV text; `config` and `base_seed` are inferred from the rows.
TimeDataset parse_csv(const std::string& text);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Writes the CSV and its JSON sidecar.
void save_dataset(const TimeDataset& ds, const std::filesystem::path& path);

/// Reads the CSV and, if present, the sidecar. Throws ParseError with the offending line.
TimeDataset load_dataset(const std::filesystem::path& path);

}  // namespace cubeseek::bench
