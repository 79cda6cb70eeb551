#pragma once

// Exact integer arithmetic for x^3 + y^3 + z^3 = k and the distance-to-nearest-integer
// fitness f_k(x, y) = || cbrt(k - x^3 - y^3) ||.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cubeseek {

using int128 = __int128;

/// Largest |x|, |y| accepted anywhere in the search.
inline constexpr std::int64_t kCoordinateCap = 1'000'000;

/// Fitness values below this are always confirmed by exact verification.
inline constexpr double kExactnessGuard = 1e-9;

struct SearchPoint {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend bool operator==(const SearchPoint&, const SearchPoint&) = default;
};

class SearchRange {
public:
    /// Throws InvalidArgument unless min <= max on both axes and every bound is within the cap.
    SearchRange(std::int64_t x_min, std::int64_t x_max, std::int64_t y_min, std::int64_t y_max);

    /// -10^p <= x <= 0 <= y <= 10^p, p in {3, 4, 5}.
    static SearchRange decade(int p);

    /// Accepts "R3" / "R4" / "R5" or explicit bounds "x_min:x_max,y_min:y_max".
    static SearchRange parse(std::string_view text);

    std::int64_t x_min() const noexcept { return x_min_; }
    std::int64_t x_max() const noexcept { return x_max_; }
    std::int64_t y_min() const noexcept { return y_min_; }
    std::int64_t y_max() const noexcept { return y_max_; }

    bool contains(const SearchPoint& p) const noexcept {
        return p.x >= x_min_ && p.x <= x_max_ && p.y >= y_min_ && p.y <= y_max_;
    }
    bool is_single_point() const noexcept { return x_min_ == x_max_ && y_min_ == y_max_; }

    /// "R3" etc. for the built-in ranges, otherwise the explicit-bounds form.
    std::string tag() const;

    friend bool operator==(const SearchRange&, const SearchRange&) = default;

private:
    std::int64_t x_min_, x_max_, y_min_, y_max_;
};

struct Solution {
    std::int64_t k = 0;
    std::int64_t x = 0;
    std::int64_t y = 0;
    std::int64_t z = 0;

    friend bool operator==(const Solution&, const Solution&) = default;
};

enum class KVerdict { searchable, insoluble };

/// min_n |v - n|, in [0, 0.5]. Throws InvalidArgument on non-finite input.
double nearest_integer_distance(double v);

/// Real cube root keeping the sign of v.
double signed_cbrt(double v);

/// k - x^3 - y^3 evaluated exactly. Throws OverflowError when |x| or |y| exceeds the cap.
int128 cube_residual(std::int64_t k, const SearchPoint& p);

/// f_k(p). Exactly 0.0 iff an integer z with x^3 + y^3 + z^3 = k exists.
double fitness(std::int64_t k, const SearchPoint& p);

/// The integer z minimising |k - x^3 - y^3 - z^3|.
std::int64_t candidate_z(std::int64_t k, const SearchPoint& p);

/// x^3 + y^3 + z^3 == k with checked 128-bit arithmetic; throws OverflowError, never guesses.
bool verify_solution(std::int64_t k, std::int64_t x, std::int64_t y, std::int64_t z);

/// k = 4 or 5 (mod 9) has no solution since cubes are 0, 1 or -1 (mod 9).
KVerdict validate_k(std::int64_t k);

/// (x, y, candidate_z) when it verifies exactly, otherwise nothing.
std::optional<Solution> confirm_solution(std::int64_t k, const SearchPoint& p);

}  // namespace cubeseek
