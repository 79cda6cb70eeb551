#include "cubeseek/pso.hpp"

#include <chrono>
#include <cmath>

#include "cubeseek/errors.hpp"

namespace cubeseek::pso {

namespace {

SearchPoint random_point(const SearchRange& range, Rng& rng) {
    const auto x = rng.uniform_int(range.x_min(), range.x_max());
    const auto y = rng.uniform_int(range.y_min(), range.y_max());
    return {x, y};
}

std::size_t argmin(const std::vector<double>& values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[best]) best = i;
    }
    return best;
}

void refresh_fitness(SwarmState& state, const SwarmConfig& cfg) {
    for (std::size_t i = 0; i < state.positions.size(); ++i) {
        state.fitnesses[i] = fitness(cfg.k, state.positions[i]);
    }
}

void refresh_sb(SwarmState& state) {
    const auto i = argmin(state.fitnesses);
    state.sb = state.positions[i];
    state.sb_fitness = state.fitnesses[i];
}

// Ring topology {i-1, i, i+1} mod s; ties keep the particle's own position first.
void refresh_nb(SwarmState& state) {
    const std::size_t s = state.positions.size();
    for (std::size_t i = 0; i < s; ++i) {
        std::size_t best = i;
        for (std::size_t j : {(i + s - 1) % s, (i + 1) % s}) {
            if (state.fitnesses[j] < state.fitnesses[best]) best = j;
        }
        state.nb[i] = state.positions[best];
    }
}

}  // namespace

void SwarmConfig::validate() const {
    if (swarm_size < 3) throw InvalidArgument("swarm size must be at least 3 for the ring topology");
    if (!(threshold > 0.0 && threshold <= 0.5)) throw InvalidArgument("threshold must lie in (0, 0.5]");
}

SwarmState init_swarm(const SwarmConfig& cfg, Rng& rng) {
    cfg.validate();
    const auto s = static_cast<std::size_t>(cfg.swarm_size);
    SwarmState state;
    state.positions.resize(s);
    state.fitnesses.resize(s);
    state.nb.resize(s);
    for (auto& p : state.positions) p = random_point(cfg.range, rng);
    refresh_fitness(state, cfg);
    refresh_sb(state);
    state.bsb = state.sb;
    state.bsb_fitness = state.sb_fitness;
    refresh_nb(state);
    return state;
}

std::int64_t position_update(std::int64_t x, std::int64_t nb, std::int64_t sb, std::int64_t bsb, double r) {
    const double pull = static_cast<double>(sb) + static_cast<double>(bsb) - 2.0 * static_cast<double>(x);
    return std::llround(static_cast<double>(nb) + 0.5 * r * pull);
}

bool dispersion_check(const SwarmState& state, const SwarmConfig& cfg) {
    int at_bsb = 0;
    for (const auto& p : state.positions) {
        if (p == state.bsb) ++at_bsb;
    }
    return at_bsb >= cfg.dispersion_parameter();
}

double bsb_acceptance_probability(double sb_fit, double bsb_fit) {
    return 1.0 - (sb_fit - bsb_fit) / 0.5;
}

bool bsb_update(double sb_fit, double bsb_fit, Rng& rng) {
    if (sb_fit < bsb_fit) return true;
    if (sb_fit == bsb_fit) return false;
    return rng.bernoulli(bsb_acceptance_probability(sb_fit, bsb_fit));
}

void step(SwarmState& state, const SwarmConfig& cfg, Rng& rng) {
    if (dispersion_check(state, cfg)) {
        for (auto& p : state.positions) p = random_point(cfg.range, rng);
        ++state.dispersions;
    } else {
        for (std::size_t i = 0; i < state.positions.size(); ++i) {
            auto& p = state.positions[i];
            const auto& nb = state.nb[i];
            const double rx = rng.uniform_open();
            const double ry = rng.uniform_open();
            p.x = position_update(p.x, nb.x, state.sb.x, state.bsb.x, rx);
            p.y = position_update(p.y, nb.y, state.sb.y, state.bsb.y, ry);
        }
        for (auto& p : state.positions) {
            if (!cfg.range.contains(p)) p = random_point(cfg.range, rng);
        }
    }

    refresh_fitness(state, cfg);
    refresh_sb(state);
    const bool adopt = cfg.probabilistic_bsb ? bsb_update(state.sb_fitness, state.bsb_fitness, rng)
                                             : state.sb_fitness < state.bsb_fitness;
    if (adopt) {
        state.bsb = state.sb;
        state.bsb_fitness = state.sb_fitness;
    }
    refresh_nb(state);
    ++state.iteration;
}

TrialRecord run(const SwarmConfig& cfg, Rng& rng) {
    cfg.validate();
    if (validate_k(cfg.k) == KVerdict::insoluble) throw InsolubleK(cfg.k);

    TrialRecord record;
    record.algorithm = Algorithm::pso;
    record.seed = rng.seed();
    if (cfg.max_iterations && *cfg.max_iterations == 0) {
        record.truncated = true;
        return record;
    }

    const auto start = std::chrono::steady_clock::now();
    auto state = init_swarm(cfg, rng);
    for (;;) {
        for (std::size_t i = 0; i < state.positions.size() && !record.solution; ++i) {
            if (state.fitnesses[i] <= cfg.threshold) record.solution = confirm_solution(cfg.k, state.positions[i]);
        }
        if (record.solution) break;
        if (cfg.max_iterations && state.iteration >= *cfg.max_iterations) {
            record.truncated = true;
            break;
        }
        step(state, cfg, rng);
    }
    record.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record.iterations = state.iteration;
    // Swarm dispersions play the role of restarts in the record.
    record.restarts = state.dispersions;
    return record;
}

}  // namespace cubeseek::pso
