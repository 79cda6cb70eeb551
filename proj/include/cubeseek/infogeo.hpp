#pragma once

// Fisher-Rao geometry of the two running-time families.
//
//   exponential: ds^2 = d lambda^2 / lambda^2               -> d = |ln(lambda2 / lambda1)|
//   log-normal:  ds^2 = (d alpha^2 + 2 d beta^2) / beta^2
//
// The log-normal metric is a scaled hyperbolic half-plane in (alpha / sqrt 2, beta), which gives
// a closed-form distance. The geodesic itself is also solved numerically as a two-point boundary
// value problem by shooting, and the two routes are checked against each other.

#include <cstddef>
#include <string>
#include <vector>

namespace cubeseek::infogeo {

enum class Family { exponential, lognormal };

std::string to_string(Family f);

struct ModelPoint {
    Family family = Family::exponential;
    double lambda = 1.0;  // exponential
    double alpha = 0.0;   // log-normal
    double beta = 1.0;

    /// Throw InvalidArgument unless lambda > 0 / beta > 0.
    static ModelPoint exponential(double lambda);
    static ModelPoint lognormal(double alpha, double beta);
};

using Matrix = std::vector<std::vector<double>>;

/// g_ab = E[d_a ln f * d_b ln f] by adaptive Gauss-Kronrod quadrature over s = ln t in (-inf, inf).
/// Throws NumericError when the error estimate exceeds `tolerance` (absolute, relative for entries above 1).
Matrix fisher_metric_numeric(const ModelPoint& point, double tolerance = 1e-9);

/// Closed-form metric: [[1/lambda^2]] or diag(1/beta^2, 2/beta^2).
Matrix fisher_metric(const ModelPoint& point);

double exp_distance(double lambda1, double lambda2);

/// sqrt(2) * arccosh(1 + (d_alpha^2 / 2 + d_beta^2) / (2 beta1 beta2)).
double lognormal_distance_closed_form(const ModelPoint& p1, const ModelPoint& p2);

struct GeodesicSample {
    double r = 0.0;
    double alpha = 0.0;
    double beta = 1.0;
    double dalpha = 0.0;  // d alpha / dr
    double dbeta = 0.0;   // d beta / dr
};

struct GeodesicPath {
    std::vector<GeodesicSample> samples;  // r = 0 .. 1, uniformly spaced
    ModelPoint start;
    ModelPoint end;
    double residual = 0.0;  // max |endpoint mismatch| after shooting
    int newton_iterations = 0;
};

enum class InitialGuess {
    closed_form,    // tangent of the hyperbolic connecting arc
    straight_line,  // alpha' = d_alpha, beta' = d_beta
};

struct ShootingOptions {
    double tolerance = 1e-8;
    int steps = 2000;  // RK4 steps over r in [0, 1]
    int max_iterations = 50;
    InitialGuess guess = InitialGuess::closed_form;
};

/// Solves alpha'' - (2 beta'/beta) alpha' = 0, beta'' - beta'^2/beta + alpha'^2/(2 beta) = 0 with
/// both endpoints fixed, by Newton iteration on the initial slopes with RK4 sensitivities.
/// Throws NumericError carrying the best residual when it does not converge.
GeodesicPath lognormal_geodesic(const ModelPoint& p1, const ModelPoint& p2, const ShootingOptions& options = {});

/// Speed (1/beta) sqrt(alpha'^2 + 2 beta'^2) at one sample.
double geodesic_speed(const GeodesicSample& s);

/// Composite Simpson (trapezoid for an even sample count) of the speed over r.
double geodesic_length(const GeodesicPath& path);

/// (max speed - min speed) / mean speed along the path; 0 for a constant path.
double speed_variation(const GeodesicPath& path);

enum class LognormalMethod { shooting, closed_form };

/// Pairwise distances; exponential via the log ratio, log-normal via `method`.
/// Throws InvalidArgument when the points mix families.
Matrix distance_matrix(const std::vector<ModelPoint>& models, LognormalMethod method = LognormalMethod::shooting);

}  // namespace cubeseek::infogeo
