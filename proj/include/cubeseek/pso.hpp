#pragma once

// Modified dispersive particle swarm over the integer lattice.
//
// Each particle follows its ring-neighbourhood best, pulled towards the current swarm best (sb)
// and a remembered best swarm best (bsb). When enough particles sit on bsb the whole swarm is
// re-randomised; bsb survives dispersions and may probabilistically adopt a worse sb so the
// search can leave a local minimum.

#include <cstdint>
#include <optional>
#include <vector>

#include "cubeseek/cubes.hpp"
#include "cubeseek/random.hpp"
#include "cubeseek/trial.hpp"

namespace cubeseek::pso {

inline constexpr int kDefaultSwarmSize = 50;
inline constexpr double kDefaultThreshold = 1e-4;

struct SwarmConfig {
    std::int64_t k = 2;
    SearchRange range = SearchRange::decade(3);
    int swarm_size = kDefaultSwarmSize;
    double threshold = kDefaultThreshold;
    std::optional<std::uint64_t> max_iterations;
    /// Disables adoption of a worse sb as bsb; used to check bsb monotonicity.
    bool probabilistic_bsb = true;

    /// floor(s / 5), at least 1.
    int dispersion_parameter() const noexcept { return swarm_size / 5 > 0 ? swarm_size / 5 : 1; }

    /// Throws InvalidArgument on s < 3 or a threshold outside (0, 0.5].
    void validate() const;
};

struct SwarmState {
    std::vector<SearchPoint> positions;
    std::vector<double> fitnesses;
    SearchPoint sb;
    double sb_fitness = 0.5;
    SearchPoint bsb;
    double bsb_fitness = 0.5;
    std::vector<SearchPoint> nb;
    std::uint64_t iteration = 0;
    std::uint64_t dispersions = 0;

    friend bool operator==(const SwarmState&, const SwarmState&) = default;
};

SwarmState init_swarm(const SwarmConfig& cfg, Rng& rng);

/// round(nb + (r/2)(sb + bsb - 2x)), rounding half away from zero.
std::int64_t position_update(std::int64_t x, std::int64_t nb, std::int64_t sb, std::int64_t bsb, double r);

/// True when at least dp particles occupy bsb.
bool dispersion_check(const SwarmState& state, const SwarmConfig& cfg);

/// Acceptance probability of a worse sb: 1 - (sb_fit - bsb_fit) / 0.5.
double bsb_acceptance_probability(double sb_fit, double bsb_fit);

/// Whether sb replaces bsb. Always on improvement, never on a tie, otherwise at random.
bool bsb_update(double sb_fit, double bsb_fit, Rng& rng);

/// One iteration: dispersion or position update, confinement, then sb / bsb / nb refresh.
void step(SwarmState& state, const SwarmConfig& cfg, Rng& rng);

/// Iterate until some particle has fitness <= threshold and verifies exactly.
/// Throws InsolubleK for k = 4, 5 (mod 9) before doing any work.
TrialRecord run(const SwarmConfig& cfg, Rng& rng);

}  // namespace cubeseek::pso
