#pragma once

#include "ou/errors.hpp"

namespace ou {

// Nonnegative finite time. Implicitly constructible from double so call
// sites stay readable; construction validates.
struct TimePoint {
    double t;

    TimePoint(double time);  // NOLINT(google-explicit-constructor)
};

// The model quadruple for
//
//   dx_t = theta (mu - x_t) dt + sigma dW_t
//
// theta: reversion rate (> 0), mu: equilibrium level, sigma: volatility
// (> 0), x0: initial value. All fields finite; violations are rejected at
// construction, never surfaced later as NaN.
struct OuParams {
    double theta;
    double mu;
    double sigma;
    double x0;

    OuParams(double theta, double mu, double sigma, double x0);
};

// One-dimensional normal law (mean, variance >= 0); the transition
// distribution of x_t. variance == 0 denotes a point mass.
struct GaussianLaw {
    double mean = 0.0;
    double variance = 0.0;

    // Value of a draw given a standard-normal deviate.
    double sample(double xi) const;
};

// E(x_t) = x0 e^{-theta t} + mu (1 - e^{-theta t}).
double transition_mean(const OuParams& p, TimePoint t);

// var(x_t) = sigma^2/(2 theta) (1 - e^{-2 theta t}); nondecreasing in t with
// limit sigma^2/(2 theta).
double transition_variance(const OuParams& p, TimePoint t);

// cov(x_s, x_t) = sigma^2/(2 theta) (e^{-theta |t-s|} - e^{-theta (t+s)}).
// Symmetric in (s, t); covariance(p, t, t) == transition_variance(p, t).
double covariance(const OuParams& p, TimePoint s, TimePoint t);

// The conditional law of x_t given x_0 = p.x0. At t = 0 this is the point
// mass at x0.
GaussianLaw transition_law(const OuParams& p, TimePoint t);

// Distributionally exact one-step update: given x_t = x and a standard
// normal deviate xi,
//
//   x' = x e^{-theta dt} + mu (1 - e^{-theta dt})
//        + sqrt(sigma^2/(2 theta) (1 - e^{-2 theta dt})) xi.
//
// With xi = 0 this returns the conditional mean.
double exact_step(const OuParams& p, double x, double dt, double xi);

}  // namespace ou
