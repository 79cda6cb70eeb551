#include "cubeseek/trial.hpp"

#include "cubeseek/errors.hpp"

namespace cubeseek {

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::pso: return "pso";
        case Algorithm::sa: return "sa";
        case Algorithm::rsa: return "rsa";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view text) {
    if (text == "pso") return Algorithm::pso;
    if (text == "sa") return Algorithm::sa;
    if (text == "rsa") return Algorithm::rsa;
    throw InvalidArgument("unknown algorithm '" + std::string(text) + "' (expected pso, sa or rsa)");
}

InsolubleK::InsolubleK(std::int64_t k)
    : std::invalid_argument("k = " + std::to_string(k) + " is " + std::to_string(((k % 9) + 9) % 9) +
                            " (mod 9); cubes are 0 or +-1 (mod 9), so x^3 + y^3 + z^3 can never be 4 or 5 (mod 9)") {}

}  // namespace cubeseek
