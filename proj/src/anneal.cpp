#include "cubeseek/anneal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "cubeseek/errors.hpp"

namespace cubeseek::anneal {

namespace {

struct Box {
    std::int64_t x0, x1, y0, y1;
    std::int64_t width() const { return x1 - x0 + 1; }
    std::int64_t height() const { return y1 - y0 + 1; }
};

Box clipped_box(const SearchPoint& p, const SearchRange& range, int radius) {
    if (!range.contains(p)) {
        throw InvalidArgument("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                              ") lies outside the search range");
    }
    return {std::max(p.x - radius, range.x_min()), std::min(p.x + radius, range.x_max()),
            std::max(p.y - radius, range.y_min()), std::min(p.y + radius, range.y_max())};
}

SearchPoint random_point(const SearchRange& range, Rng& rng) {
    const auto x = rng.uniform_int(range.x_min(), range.x_max());
    const auto y = rng.uniform_int(range.y_min(), range.y_max());
    return {x, y};
}

}  // namespace

void AnnealConfig::validate() const {
    if (neighbourhood_radius < 1) throw InvalidArgument("neighbourhood radius must be at least 1");
    if (restart_threshold && *restart_threshold < 2) throw InvalidArgument("restart threshold must be at least 2");
    if (!(threshold > 0.0 && threshold <= 0.5)) throw InvalidArgument("threshold must lie in (0, 0.5]");
    if (!(cooling_offset > 0.0)) throw InvalidArgument("cooling offset must be positive");
}

double temperature(std::uint64_t m, double cooling_offset) {
    if (m < 1) throw InvalidArgument("cooling clock starts at m = 1");
    return 1.0 / (std::log(static_cast<double>(m)) + cooling_offset);
}

std::vector<SearchPoint> neighbourhood(const SearchPoint& p, const SearchRange& range, int radius) {
    const Box box = clipped_box(p, range, radius);
    std::vector<SearchPoint> out;
    out.reserve(static_cast<std::size_t>(box.width() * box.height() - 1));
    for (auto x = box.x0; x <= box.x1; ++x) {
        for (auto y = box.y0; y <= box.y1; ++y) {
            if (x != p.x || y != p.y) out.push_back({x, y});
        }
    }
    return out;
}

SearchPoint propose(const SearchPoint& p, const SearchRange& range, Rng& rng, int radius) {
    const Box box = clipped_box(p, range, radius);
    const std::int64_t count = box.width() * box.height() - 1;
    if (count == 0) throw InvalidArgument("empty neighbourhood: the search range is a single point");
    // Index into the row-major box, skipping the centre.
    const std::int64_t centre = (p.x - box.x0) * box.height() + (p.y - box.y0);
    std::int64_t u = rng.uniform_int(0, count - 1);
    if (u >= centre) ++u;
    return {box.x0 + u / box.height(), box.y0 + u % box.height()};
}

bool accept(double delta_e, double temp, Rng& rng) {
    if (delta_e <= 0.0) return true;
    return rng.uniform() < std::exp(-delta_e / temp);
}

std::uint64_t next_same_energy_run(std::uint64_t run, bool accepted, double old_energy, double new_energy) {
    if (accepted && new_energy != old_energy) return 1;
    return run + 1;
}

AnnealState init_state(const AnnealConfig& cfg, Rng& rng) {
    AnnealState state;
    state.current = random_point(cfg.range, rng);
    state.energy = fitness(cfg.k, state.current);
    return state;
}

void step(AnnealState& state, const AnnealConfig& cfg, Rng& rng) {
    const SearchPoint next = propose(state.current, cfg.range, rng, cfg.neighbourhood_radius);
    const double next_energy = fitness(cfg.k, next);
    const bool accepted = accept(next_energy - state.energy, temperature(state.m, cfg.cooling_offset), rng);
    state.same_energy_run = next_same_energy_run(state.same_energy_run, accepted, state.energy, next_energy);
    if (accepted) {
        state.current = next;
        state.energy = next_energy;
    }
    ++state.m;
    ++state.iterations;

    if (cfg.restart_threshold && state.same_energy_run >= *cfg.restart_threshold) {
        state.current = random_point(cfg.range, rng);
        state.energy = fitness(cfg.k, state.current);
        state.m = 1;
        state.same_energy_run = 1;
        ++state.restarts;
    }
}

TrialRecord run(const AnnealConfig& cfg, Rng& rng) {
    cfg.validate();
    if (validate_k(cfg.k) == KVerdict::insoluble) throw InsolubleK(cfg.k);
    if (cfg.range.is_single_point()) throw InvalidArgument("annealing needs a range with more than one point");

    TrialRecord record;
    record.algorithm = cfg.restart_threshold ? Algorithm::rsa : Algorithm::sa;
    record.seed = rng.seed();
    if (cfg.max_iterations && *cfg.max_iterations == 0) {
        record.truncated = true;
        return record;
    }

    const auto start = std::chrono::steady_clock::now();
    auto state = init_state(cfg, rng);
    for (;;) {
        if (state.energy <= cfg.threshold) {
            record.solution = confirm_solution(cfg.k, state.current);
            if (record.solution) break;
        }
        if (cfg.max_iterations && state.iterations >= *cfg.max_iterations) {
            record.truncated = true;
            break;
        }
        step(state, cfg, rng);
    }
    record.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record.iterations = state.iterations;
    record.restarts = state.restarts;
    return record;
}

TrialRecord run_sa(AnnealConfig cfg, Rng& rng) {
    cfg.restart_threshold.reset();
    return run(cfg, rng);
}

TrialRecord run_rsa(AnnealConfig cfg, Rng& rng) {
    if (!cfg.restart_threshold) cfg.restart_threshold = kDefaultRestartThreshold;
    return run(cfg, rng);
}

}  // namespace cubeseek::anneal
