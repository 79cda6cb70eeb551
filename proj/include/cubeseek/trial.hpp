#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cubeseek/cubes.hpp"

namespace cubeseek {

enum class Algorithm { pso, sa, rsa };

std::string_view to_string(Algorithm a);
/// Throws InvalidArgument on anything other than pso / sa / rsa.
Algorithm parse_algorithm(std::string_view text);

/// Outcome of one solver run.
struct TrialRecord {
    Algorithm algorithm = Algorithm::pso;
    std::uint64_t seed = 0;
    double elapsed_seconds = 0.0;
    std::uint64_t iterations = 0;
    std::uint64_t restarts = 0;
    std::optional<Solution> solution;  // present iff !truncated
    bool truncated = false;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Thrown by the solvers when k is in a congruence class with no solutions.
struct InsolubleK : std::invalid_argument {
    explicit InsolubleK(std::int64_t k);
};

}  // namespace cubeseek
