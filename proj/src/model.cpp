#include "ou/model.hpp"

#include <cmath>
#include <string>

namespace ou {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw ConfigError(std::string(name) + " must be finite");
    }
}

}  // namespace

TimePoint::TimePoint(double time) : t(time) {
    require_finite(t, "time");
    if (t < 0.0) {
        throw ConfigError("time must be nonnegative, got " + std::to_string(t));
    }
}

OuParams::OuParams(double theta_, double mu_, double sigma_, double x0_)
    : theta(theta_), mu(mu_), sigma(sigma_), x0(x0_) {
    require_finite(theta, "theta");
    require_finite(mu, "mu");
    require_finite(sigma, "sigma");
    require_finite(x0, "x0");
    if (theta <= 0.0) {
        throw ConfigError("theta must be positive, got " + std::to_string(theta));
    }
    if (sigma <= 0.0) {
        throw ConfigError("sigma must be positive, got " + std::to_string(sigma));
    }
}

double GaussianLaw::sample(double xi) const {
    return mean + std::sqrt(variance) * xi;
}

double transition_mean(const OuParams& p, TimePoint t) {
    // 1 - e^{-theta t} via expm1 keeps small-t accuracy.
    return p.x0 * std::exp(-p.theta * t.t) - p.mu * std::expm1(-p.theta * t.t);
}

double transition_variance(const OuParams& p, TimePoint t) {
    return p.sigma * p.sigma / (2.0 * p.theta) * (-std::expm1(-2.0 * p.theta * t.t));
}

double covariance(const OuParams& p, TimePoint s, TimePoint t) {
    // e^{-theta |t-s|} - e^{-theta (t+s)} factored as
    // e^{-theta |t-s|} (1 - e^{-2 theta min(s,t)}), which degrades gracefully
    // for small times and reduces to transition_variance bit-for-bit at s == t.
    double gap = std::abs(t.t - s.t);
    double tmin = std::min(s.t, t.t);
    return p.sigma * p.sigma / (2.0 * p.theta) *
           (std::exp(-p.theta * gap) * (-std::expm1(-2.0 * p.theta * tmin)));
}

GaussianLaw transition_law(const OuParams& p, TimePoint t) {
    return GaussianLaw{transition_mean(p, t), transition_variance(p, t)};
}

double exact_step(const OuParams& p, double x, double dt, double xi) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ConfigError("exact_step: dt must be positive and finite");
    }
    if (!std::isfinite(xi)) {
        throw ConfigError("exact_step: xi must be finite");
    }
    double mean = x * std::exp(-p.theta * dt) - p.mu * std::expm1(-p.theta * dt);
    return mean + std::sqrt(transition_variance(p, dt)) * xi;
}

}  // namespace ou
