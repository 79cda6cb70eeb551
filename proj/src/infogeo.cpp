#include "cubeseek/infogeo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cubeseek/errors.hpp"

namespace cubeseek::infogeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integrates g over s in (-inf, inf) after centring at `centre` and scaling by `width`.
double integrate_line(const auto& g, double centre, double width, double tolerance) {
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        [&](double x) { return width * g(centre + width * x); }, -kInf, kInf, 20, 1e-13, &error);
    if (!std::isfinite(value) || error > tolerance * std::max(1.0, std::fabs(value))) {
        throw NumericError("Fisher metric quadrature did not reach the requested tolerance", error);
    }
    return value;
}

void require_lognormal(const ModelPoint& p) {
    if (p.family != Family::lognormal) throw InvalidArgument("expected a log-normal model point");
    if (!(p.beta > 0.0)) throw InvalidArgument("log-normal beta must be positive");
}

// Geodesic state plus its sensitivities to the two initial slopes:
// [alpha, beta, alpha', beta', d/da0 (4 entries), d/db0 (4 entries)].
using State = std::array<double, 12>;

std::optional<State> derivative(const State& y) {
    const double beta = y[1];
    if (!(beta > 0.0)) return std::nullopt;
    const double a = y[2];
    const double b = y[3];
    State d{};
    d[0] = a;
    d[1] = b;
    d[2] = 2.0 * a * b / beta;
    d[3] = (b * b - 0.5 * a * a) / beta;
    // Jacobian of the right-hand side with respect to (alpha, beta, a, b); alpha does not appear.
    const double ib = 1.0 / beta;
    const double j2[4] = {0.0, -2.0 * a * b * ib * ib, 2.0 * b * ib, 2.0 * a * ib};
    const double j3[4] = {0.0, -(b * b - 0.5 * a * a) * ib * ib, -a * ib, 2.0 * b * ib};
    for (int k = 0; k < 2; ++k) {
        const double* s = &y[4 + 4 * k];
        double* ds = &d[4 + 4 * k];
        ds[0] = s[2];
        ds[1] = s[3];
        ds[2] = j2[0] * s[0] + j2[1] * s[1] + j2[2] * s[2] + j2[3] * s[3];
        ds[3] = j3[0] * s[0] + j3[1] * s[1] + j3[2] * s[2] + j3[3] * s[3];
    }
    return d;
}

State axpy(const State& y, double h, const State& k) {
    State out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + h * k[i];
    return out;
}

// Classical RK4 from r = 0 to 1. Returns nothing if beta leaves the half-plane.
std::optional<State> shoot(const ModelPoint& p1, double a0, double b0, int steps,
                           std::vector<GeodesicSample>* samples) {
    State y{};
    y[0] = p1.alpha;
    y[1] = p1.beta;
    y[2] = a0;
    y[3] = b0;
    y[6] = 1.0;   // d alpha'(0) / d a0
    y[11] = 1.0;  // d beta'(0) / d b0
    const double h = 1.0 / steps;
    if (samples) {
        samples->clear();
        samples->reserve(static_cast<std::size_t>(steps) + 1);
        samples->push_back({0.0, y[0], y[1], y[2], y[3]});
    }
    for (int i = 0; i < steps; ++i) {
        const auto k1 = derivative(y);
        if (!k1) return std::nullopt;
        const auto k2 = derivative(axpy(y, 0.5 * h, *k1));
        if (!k2) return std::nullopt;
        const auto k3 = derivative(axpy(y, 0.5 * h, *k2));
        if (!k3) return std::nullopt;
        const auto k4 = derivative(axpy(y, h, *k3));
        if (!k4) return std::nullopt;
        for (std::size_t j = 0; j < y.size(); ++j) {
            y[j] += h / 6.0 * ((*k1)[j] + 2.0 * (*k2)[j] + 2.0 * (*k3)[j] + (*k4)[j]);
        }
        if (!(y[1] > 0.0)) return std::nullopt;
        if (samples) samples->push_back({(i + 1) * h, y[0], y[1], y[2], y[3]});
    }
    return y;
}

// Initial slopes of the hyperbolic arc through both points, in (u = alpha / sqrt 2, beta).
std::array<double, 2> closed_form_slopes(const ModelPoint& p1, const ModelPoint& p2) {
    const double u1 = p1.alpha / std::numbers::sqrt2;
    const double u2 = p2.alpha / std::numbers::sqrt2;
    const double hyperbolic = lognormal_distance_closed_form(p1, p2) / std::numbers::sqrt2;
    if (hyperbolic == 0.0) return {0.0, 0.0};
    if (std::fabs(u2 - u1) <= 1e-14 * (1.0 + std::fabs(u1))) {
        return {0.0, p1.beta * std::log(p2.beta / p1.beta)};
    }
    const double centre = (u2 * u2 + p2.beta * p2.beta - u1 * u1 - p1.beta * p1.beta) / (2.0 * (u2 - u1));
    const double radius = std::hypot(u1 - centre, p1.beta);
    const double sign = u2 < u1 ? 1.0 : -1.0;
    const double speed = p1.beta * hyperbolic;
    const double du = sign * (-p1.beta / radius) * speed;
    const double db = sign * ((u1 - centre) / radius) * speed;
    return {std::numbers::sqrt2 * du, db};
}

}  // namespace

std::string to_string(Family f) { return f == Family::exponential ? "exponential" : "lognormal"; }

ModelPoint ModelPoint::exponential(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("exponential rate must be positive");
    ModelPoint p;
    p.family = Family::exponential;
    p.lambda = lambda;
    return p;
}

ModelPoint ModelPoint::lognormal(double alpha, double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta) || !std::isfinite(alpha)) {
        throw InvalidArgument("log-normal beta must be positive");
    }
    ModelPoint p;
    p.family = Family::lognormal;
    p.alpha = alpha;
    p.beta = beta;
    return p;
}

Matrix fisher_metric_numeric(const ModelPoint& point, double tolerance) {
    if (point.family == Family::exponential) {
        const double lambda = point.lambda;
        if (!(lambda > 0.0)) throw InvalidArgument("exponential rate must be positive");
        // t = e^s, dt = t ds; score d/dlambda ln f = 1/lambda - t.
        auto g = [lambda](double s) {
            const double t = std::exp(s);
            if (lambda * t > 800.0) return 0.0;  // e^{-lambda t} underflows
            const double score = 1.0 / lambda - t;
            return score * score * lambda * std::exp(-lambda * t) * t;
        };
        return {{integrate_line(g, -std::log(lambda), 1.0, tolerance)}};
    }

    require_lognormal(point);
    const double alpha = point.alpha;
    const double beta = point.beta;
    // With s = ln t the density becomes the normal density of s, so f dt = phi((s - alpha)/beta)/beta ds.
    auto density = [=](double s) {
        const double z = (s - alpha) / beta;
        return std::exp(-0.5 * z * z) / (beta * std::sqrt(2.0 * std::numbers::pi));
    };
    auto score_alpha = [=](double s) { return (s - alpha) / (beta * beta); };
    auto score_beta = [=](double s) {
        const double d = s - alpha;
        return -1.0 / beta + d * d / (beta * beta * beta);
    };
    const double gaa = integrate_line([&](double s) { return score_alpha(s) * score_alpha(s) * density(s); },
                                      alpha, beta, tolerance);
    const double gab = integrate_line([&](double s) { return score_alpha(s) * score_beta(s) * density(s); },
                                      alpha, beta, tolerance);
    const double gbb = integrate_line([&](double s) { return score_beta(s) * score_beta(s) * density(s); },
                                      alpha, beta, tolerance);
    return {{gaa, gab}, {gab, gbb}};
}

Matrix fisher_metric(const ModelPoint& point) {
    if (point.family == Family::exponential) return {{1.0 / (point.lambda * point.lambda)}};
    const double ib2 = 1.0 / (point.beta * point.beta);
    return {{ib2, 0.0}, {0.0, 2.0 * ib2}};
}

double exp_distance(double lambda1, double lambda2) {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw InvalidArgument("exponential rates must be positive");
    return std::fabs(std::log(lambda2) - std::log(lambda1));
}

double lognormal_distance_closed_form(const ModelPoint& p1, const ModelPoint& p2) {
    require_lognormal(p1);
    require_lognormal(p2);
    const double da = p1.alpha - p2.alpha;
    const double db = p1.beta - p2.beta;
    const double arg = (0.5 * da * da + db * db) / (2.0 * p1.beta * p2.beta);
    // acosh(1 + x) = log1p(x + sqrt(x (x + 2))) stays accurate for tiny x.
    return std::numbers::sqrt2 * std::log1p(arg + std::sqrt(arg * (arg + 2.0)));
}

namespace {

struct NewtonResult {
    std::array<double, 2> slopes{};
    double residual = kInf;
    int iterations = 0;
    bool converged = false;
};

// Damped Newton on the initial slopes so that the path from p1 lands on `target`.
NewtonResult newton_shoot(const ModelPoint& p1, const ModelPoint& target, std::array<double, 2> v,
                          const ShootingOptions& options) {
    NewtonResult out;
    auto mismatch = [&](const State& y) { return std::array<double, 2>{y[0] - target.alpha, y[1] - target.beta}; };
    auto norm = [](const std::array<double, 2>& f) { return std::max(std::fabs(f[0]), std::fabs(f[1])); };

    auto end = shoot(p1, v[0], v[1], options.steps, nullptr);
    if (!end) return out;
    auto f = mismatch(*end);
    out.slopes = v;
    out.residual = norm(f);

    while (out.residual > options.tolerance && out.iterations < options.max_iterations) {
        ++out.iterations;
        // Sensitivities d(alpha(1), beta(1)) / d(a0, b0).
        const double j00 = (*end)[4], j10 = (*end)[5];
        const double j01 = (*end)[8], j11 = (*end)[9];
        const double det = j00 * j11 - j01 * j10;
        if (det == 0.0 || !std::isfinite(det)) return out;
        const double d0 = -(j11 * f[0] - j01 * f[1]) / det;
        const double d1 = -(-j10 * f[0] + j00 * f[1]) / det;

        bool improved = false;
        for (double damping = 1.0; damping > 1e-10; damping *= 0.5) {
            const std::array<double, 2> trial{v[0] + damping * d0, v[1] + damping * d1};
            auto trial_end = shoot(p1, trial[0], trial[1], options.steps, nullptr);
            if (!trial_end) continue;
            const auto trial_f = mismatch(*trial_end);
            if (norm(trial_f) < out.residual) {
                v = trial;
                end = trial_end;
                f = trial_f;
                out.slopes = v;
                out.residual = norm(trial_f);
                improved = true;
                break;
            }
        }
        if (!improved) return out;
    }
    out.converged = out.residual <= options.tolerance;
    return out;
}

}  // namespace

GeodesicPath lognormal_geodesic(const ModelPoint& p1, const ModelPoint& p2, const ShootingOptions& options) {
    require_lognormal(p1);
    require_lognormal(p2);
    if (options.steps < 2) throw InvalidArgument("shooting needs at least two integration steps");

    const std::array<double, 2> guess = options.guess == InitialGuess::closed_form
                                            ? closed_form_slopes(p1, p2)
                                            : std::array<double, 2>{p2.alpha - p1.alpha, p2.beta - p1.beta};
    NewtonResult result = newton_shoot(p1, p2, guess, options);
    int total_iterations = result.iterations;
    double best = result.residual;

    // Continuation: move the far endpoint out from p1 in stages, warm-starting each stage.
    for (int stages = 4; !result.converged && stages <= 256; stages *= 4) {
        std::array<double, 2> v{(p2.alpha - p1.alpha) / stages, (p2.beta - p1.beta) / stages};
        NewtonResult stage;
        for (int k = 1; k <= stages; ++k) {
            const double w = static_cast<double>(k) / stages;
            const auto target = ModelPoint::lognormal(p1.alpha + w * (p2.alpha - p1.alpha),
                                                      p1.beta + w * (p2.beta - p1.beta));
            stage = newton_shoot(p1, target, v, options);
            total_iterations += stage.iterations;
            if (!stage.converged) break;
            // Extrapolate the slopes linearly in the stage parameter.
            v = {stage.slopes[0] * (k + 1) / k, stage.slopes[1] * (k + 1) / k};
        }
        if (stage.converged) result = stage;
        best = std::min(best, stage.residual);
    }
    if (!result.converged) {
        throw NumericError("geodesic shooting did not converge; best endpoint residual " + std::to_string(best), best);
    }

    GeodesicPath path;
    path.start = p1;
    path.end = p2;
    shoot(p1, result.slopes[0], result.slopes[1], options.steps, &path.samples);
    path.residual = result.residual;
    path.newton_iterations = total_iterations;
    return path;
}

double geodesic_speed(const GeodesicSample& s) {
    if (!(s.beta > 0.0)) throw InvalidArgument("geodesic path leaves the half-plane beta > 0");
    return std::sqrt(s.dalpha * s.dalpha + 2.0 * s.dbeta * s.dbeta) / s.beta;
}

double geodesic_length(const GeodesicPath& path) {
    const auto& s = path.samples;
    if (s.size() < 2) throw InvalidArgument("geodesic path needs at least two samples");
    const std::size_t intervals = s.size() - 1;
    const double h = (s.back().r - s.front().r) / static_cast<double>(intervals);
    if (intervals % 2 == 0) {
        double sum = geodesic_speed(s.front()) + geodesic_speed(s.back());
        for (std::size_t i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * geodesic_speed(s[i]);
        return sum * h / 3.0;
    }
    double sum = 0.5 * (geodesic_speed(s.front()) + geodesic_speed(s.back()));
    for (std::size_t i = 1; i < intervals; ++i) sum += geodesic_speed(s[i]);
    return sum * h;
}

double speed_variation(const GeodesicPath& path) {
    if (path.samples.empty()) throw InvalidArgument("empty geodesic path");
    double lo = kInf, hi = 0.0, sum = 0.0;
    for (const auto& s : path.samples) {
        const double v = geodesic_speed(s);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    const double mean = sum / static_cast<double>(path.samples.size());
    return mean == 0.0 ? 0.0 : (hi - lo) / mean;
}

Matrix distance_matrix(const std::vector<ModelPoint>& models, LognormalMethod method) {
    for (const auto& m : models) {
        if (m.family != models.front().family) {
            throw InvalidArgument("distance between exponential and log-normal models is undefined");
        }
    }
    const std::size_t n = models.size();
    Matrix d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = 0.0;
            if (models[i].family == Family::exponential) {
                v = exp_distance(models[i].lambda, models[j].lambda);
            } else if (method == LognormalMethod::closed_form) {
                v = lognormal_distance_closed_form(models[i], models[j]);
            } else {
                v = geodesic_length(lognormal_geodesic(models[i], models[j]));
            }
            d[i][j] = d[j][i] = v;
        }
    }
    return d;
}

}  // namespace cubeseek::infogeo
