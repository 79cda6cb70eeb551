#include "cubeseek/cubes.hpp"

#include <cmath>
#include <charconv>

#include "cubeseek/errors.hpp"

namespace cubeseek {

namespace {

int128 checked_cube(std::int64_t v) {
    int128 sq = 0;
    int128 cube = 0;
    if (__builtin_mul_overflow(static_cast<int128>(v), static_cast<int128>(v), &sq) ||
        __builtin_mul_overflow(sq, static_cast<int128>(v), &cube)) {
        throw OverflowError("cube of " + std::to_string(v) + " exceeds 128-bit range");
    }
    return cube;
}

int128 checked_add(int128 a, int128 b) {
    int128 out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw OverflowError("sum of cubes exceeds 128-bit range");
    return out;
}

int128 abs128(int128 v) { return v < 0 ? -v : v; }

void require_capped(const SearchPoint& p) {
    if (p.x > kCoordinateCap || p.x < -kCoordinateCap || p.y > kCoordinateCap || p.y < -kCoordinateCap) {
        throw OverflowError("search point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                            ") exceeds the coordinate cap of 10^6");
    }
}

// Residual minimiser around a floating cube root; the true root is within one of round(cbrt).
std::int64_t nearest_cube_root(int128 n, double root) {
    const auto z0 = static_cast<std::int64_t>(std::llround(root));
    std::int64_t best = z0;
    int128 best_err = abs128(n - checked_cube(z0));
    for (std::int64_t z : {z0 - 1, z0 + 1}) {
        const int128 err = abs128(n - checked_cube(z));
        if (err < best_err) {
            best = z;
            best_err = err;
        }
    }
    return best;
}

std::int64_t parse_int(std::string_view s, std::string_view whole) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InvalidArgument("malformed range '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace

SearchRange::SearchRange(std::int64_t x_min, std::int64_t x_max, std::int64_t y_min, std::int64_t y_max)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
    if (x_min > x_max || y_min > y_max) throw InvalidArgument("empty search range");
    for (auto b : {x_min, x_max, y_min, y_max}) {
        if (b > kCoordinateCap || b < -kCoordinateCap) {
            throw InvalidArgument("range bound " + std::to_string(b) + " exceeds the coordinate cap of 10^6");
        }
    }
}

SearchRange SearchRange::decade(int p) {
    if (p < 3 || p > 5) throw InvalidArgument("built-in ranges are R3, R4 and R5");
    std::int64_t lim = 1;
    for (int i = 0; i < p; ++i) lim *= 10;
    return SearchRange(-lim, 0, 0, lim);
}

SearchRange SearchRange::parse(std::string_view text) {
    if (text.size() == 2 && (text[0] == 'R' || text[0] == 'r') && text[1] >= '3' && text[1] <= '5') {
        return decade(text[1] - '0');
    }
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) throw InvalidArgument("malformed range '" + std::string(text) + "'");
    auto split = [&](std::string_view part) {
        const auto colon = part.find(':', part.empty() ? 0 : 1);
        if (colon == std::string_view::npos) throw InvalidArgument("malformed range '" + std::string(text) + "'");
        return std::pair{parse_int(part.substr(0, colon), text), parse_int(part.substr(colon + 1), text)};
    };
    auto [x0, x1] = split(text.substr(0, comma));
    auto [y0, y1] = split(text.substr(comma + 1));
    return SearchRange(x0, x1, y0, y1);
}

std::string SearchRange::tag() const {
    for (int p = 3; p <= 5; ++p) {
        if (*this == decade(p)) return "R" + std::to_string(p);
    }
    return std::to_string(x_min_) + ":" + std::to_string(x_max_) + "," + std::to_string(y_min_) + ":" +
           std::to_string(y_max_);
}

double nearest_integer_distance(double v) {
    if (!std::isfinite(v)) throw InvalidArgument("nearest_integer_distance: non-finite input");
    return std::fabs(v - std::round(v));
}

double signed_cbrt(double v) {
    if (!std::isfinite(v)) throw InvalidArgument("signed_cbrt: non-finite input");
    const double r = std::cbrt(v);
    // libm may miss exact cubes by an ulp.
    const double n = std::round(r);
    return n * n * n == v ? n : r;
}

int128 cube_residual(std::int64_t k, const SearchPoint& p) {
    require_capped(p);
    return static_cast<int128>(k) - checked_cube(p.x) - checked_cube(p.y);
}

double fitness(std::int64_t k, const SearchPoint& p) {
    const int128 n = cube_residual(k, p);
    if (n == 0) return 0.0;
    const double root = std::cbrt(static_cast<double>(n));
    const std::int64_t z = nearest_cube_root(n, root);
    const int128 r = n - checked_cube(z);
    if (r == 0) return 0.0;
    // cbrt(n) - z = r / (a^2 + a z + z^2) keeps full relative accuracy when the root is close to z,
    // where a plain |a - round(a)| would cancel to zero for cubes near 10^18.
    const auto zd = static_cast<double>(z);
    const double near = std::fabs(static_cast<double>(r)) / (root * root + root * zd + zd * zd);
    if (near < 0.25) return near;
    return nearest_integer_distance(root);
}

std::int64_t candidate_z(std::int64_t k, const SearchPoint& p) {
    const int128 n = cube_residual(k, p);
    return nearest_cube_root(n, std::cbrt(static_cast<double>(n)));
}

bool verify_solution(std::int64_t k, std::int64_t x, std::int64_t y, std::int64_t z) {
    const int128 sum = checked_add(checked_add(checked_cube(x), checked_cube(y)), checked_cube(z));
    return sum == static_cast<int128>(k);
}

KVerdict validate_k(std::int64_t k) {
    const auto r = ((k % 9) + 9) % 9;
    return (r == 4 || r == 5) ? KVerdict::insoluble : KVerdict::searchable;
}

std::optional<Solution> confirm_solution(std::int64_t k, const SearchPoint& p) {
    const std::int64_t z = candidate_z(k, p);
    if (!verify_solution(k, p.x, p.y, z)) return std::nullopt;
    return Solution{k, p.x, p.y, z};
}

}  // namespace cubeseek
