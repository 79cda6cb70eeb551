#pragma once

// Simulated annealing over the integer lattice with a logarithmic cooling schedule and a clipped
// box neighbourhood. Setting `restart_threshold` turns it into the restarting variant: after that
// many consecutive states with the same energy the walker jumps to a fresh random state and the
// cooling clock starts again.

#include <cstdint>
#include <optional>
#include <vector>

#include "cubeseek/cubes.hpp"
#include "cubeseek/random.hpp"
#include "cubeseek/trial.hpp"

namespace cubeseek::anneal {

inline constexpr int kDefaultRadius = 10;
inline constexpr double kDefaultCoolingOffset = 0.01;
inline constexpr std::uint64_t kDefaultRestartThreshold = 30;
inline constexpr double kDefaultThreshold = 1e-4;

struct AnnealConfig {
    std::int64_t k = 2;
    SearchRange range = SearchRange::decade(3);
    double threshold = kDefaultThreshold;
    int neighbourhood_radius = kDefaultRadius;
    double cooling_offset = kDefaultCoolingOffset;
    /// Absent: plain SA. Present: restart after this many equal-energy states.
    std::optional<std::uint64_t> restart_threshold;
    std::optional<std::uint64_t> max_iterations;

    void validate() const;
};

struct AnnealState {
    SearchPoint current;
    double energy = 0.5;
    std::uint64_t m = 1;  // cooling clock, starts at 1 and resets on restart
    std::uint64_t same_energy_run = 1;
    std::uint64_t iterations = 0;
    std::uint64_t restarts = 0;

    friend bool operator==(const AnnealState&, const AnnealState&) = default;
};

/// 1 / (ln m + offset). Throws InvalidArgument for m < 1.
double temperature(std::uint64_t m, double cooling_offset = kDefaultCoolingOffset);

/// The (2r+1)^2 box around p minus p, clipped to the range, in row-major order.
std::vector<SearchPoint> neighbourhood(const SearchPoint& p, const SearchRange& range,
                                       int radius = kDefaultRadius);

/// Uniform draw from neighbourhood(p, range, radius) without materialising it.
SearchPoint propose(const SearchPoint& p, const SearchRange& range, Rng& rng, int radius = kDefaultRadius);

/// Metropolis rule: always for delta_e <= 0, otherwise with probability exp(-delta_e / temp).
bool accept(double delta_e, double temp, Rng& rng);

/// Equal-energy run length after one round: retained or equal-energy moves extend it,
/// a move to a different energy restarts it at 1.
std::uint64_t next_same_energy_run(std::uint64_t run, bool accepted, double old_energy, double new_energy);

AnnealState init_state(const AnnealConfig& cfg, Rng& rng);

/// One proposal / acceptance round, including the restart rule when enabled.
void step(AnnealState& state, const AnnealConfig& cfg, Rng& rng);

/// Runs plain SA or rSA depending on cfg.restart_threshold.
TrialRecord run(const AnnealConfig& cfg, Rng& rng);

/// Plain SA; ignores any restart threshold in cfg.
TrialRecord run_sa(AnnealConfig cfg, Rng& rng);

/// Restarting SA; uses the default threshold of 30 when cfg has none.
TrialRecord run_rsa(AnnealConfig cfg, Rng& rng);

}  // namespace cubeseek::anneal
