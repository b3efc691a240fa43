#include "ou/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ou {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double require(const std::optional<double>& field, const char* name, const char* who) {
    if (!field) {
        throw ConfigError(std::string(who) + ": known context is missing " + name);
    }
    return *field;
}

// Closed forms applied to a prefix mean / prefix sum of squares. The running
// traces reuse these so the final trace entry is bit-identical to the point
// estimator.

double x0_from_mean(double mean, double theta, double mu, double t) {
    double growth = std::exp(theta * t);
    return growth * mean - mu * growth * (-std::expm1(-theta * t));
}

double mu_from_mean(double mean, double theta, double x0, double t) {
    double decay = std::exp(-theta * t);
    double denom = -std::expm1(-theta * t);
    if (denom <= 0.0) {
        throw ConfigError("estimate_mu: 1 - e^{-theta t} is degenerate");
    }
    return (mean - x0 * decay) / denom;
}

double theta_from_mean(double mean, double mu, double x0, double t) {
    double ratio = (mean - mu) / (x0 - mu);
    if (!(ratio > 0.0)) {
        throw EstimationError("estimate_theta: sample mean crossed the equilibrium, "
                              "log argument = " + std::to_string(ratio),
                              ratio);
    }
    return -std::log(ratio) / t;
}

double sigma_sq_from_sumsq(double sumsq, std::size_t n, double theta, double t) {
    double denom = -std::expm1(-2.0 * theta * t);
    if (denom <= 0.0) {
        throw ConfigError("estimate_sigma_sq: 1 - e^{-2 theta t} is degenerate");
    }
    return 2.0 * theta * sumsq / (static_cast<double>(n) * denom);
}

double sample_mean(const ObservationSample& sample) {
    return kahan_sum(sample.values) / static_cast<double>(sample.size());
}

}  // namespace

ObservationSample::ObservationSample(TimePoint t_, std::vector<double> values_)
    : t(t_), values(std::move(values_)) {
    if (!(t.t > 0.0)) {
        throw ConfigError("ObservationSample: observation time must be positive");
    }
    if (values.empty()) {
        throw ConfigError("ObservationSample: need at least one observation");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ConfigError("ObservationSample: observations must be finite");
        }
    }
}

const char* to_string(EstimatorKind kind) noexcept {
    switch (kind) {
        case EstimatorKind::x0: return "x0";
        case EstimatorKind::mu: return "mu";
        case EstimatorKind::theta: return "theta";
        case EstimatorKind::sigma_sq: return "sigma2";
    }
    return "?";
}

EstimatorKind estimator_from_string(std::string_view name) {
    if (name == "x0") return EstimatorKind::x0;
    if (name == "mu") return EstimatorKind::mu;
    if (name == "theta") return EstimatorKind::theta;
    if (name == "sigma2") return EstimatorKind::sigma_sq;
    throw ConfigError("unknown estimator '" + std::string(name) +
                      "' (expected x0|mu|theta|sigma2)");
}

double estimate_x0(const ObservationSample& sample, const KnownContext& ctx) {
    double theta = require(ctx.theta, "theta", "estimate_x0");
    double mu = require(ctx.mu, "mu", "estimate_x0");
    return x0_from_mean(sample_mean(sample), theta, mu, sample.t.t);
}

double estimate_mu(const ObservationSample& sample, const KnownContext& ctx) {
    double theta = require(ctx.theta, "theta", "estimate_mu");
    double x0 = require(ctx.x0, "x0", "estimate_mu");
    return mu_from_mean(sample_mean(sample), theta, x0, sample.t.t);
}

double estimate_theta(const ObservationSample& sample, const KnownContext& ctx) {
    double mu = require(ctx.mu, "mu", "estimate_theta");
    double x0 = require(ctx.x0, "x0", "estimate_theta");
    if (x0 == mu) {
        throw ConfigError("estimate_theta: x0 must differ from mu");
    }
    return theta_from_mean(sample_mean(sample), mu, x0, sample.t.t);
}

double estimate_sigma_sq(const ObservationSample& sample, const KnownContext& ctx) {
    double theta = require(ctx.theta, "theta", "estimate_sigma_sq");
    double mu = require(ctx.mu, "mu", "estimate_sigma_sq");
    double x0 = require(ctx.x0, "x0", "estimate_sigma_sq");
    OuParams p(theta, mu, 1.0, x0);
    double center = transition_mean(p, sample.t);
    KahanAccumulator sq;
    for (double z : sample.values) {
        double dev = z - center;
        sq.add(dev * dev);
    }
    return sigma_sq_from_sumsq(sq.value(), sample.size(), theta, sample.t.t);
}

double estimate(EstimatorKind kind, const ObservationSample& sample,
                const KnownContext& ctx) {
    switch (kind) {
        case EstimatorKind::x0: return estimate_x0(sample, ctx);
        case EstimatorKind::mu: return estimate_mu(sample, ctx);
        case EstimatorKind::theta: return estimate_theta(sample, ctx);
        case EstimatorKind::sigma_sq: return estimate_sigma_sq(sample, ctx);
    }
    throw ConfigError("estimate: unknown estimator kind");
}

double EstimateTrace::last() const {
    return values.empty() ? kNaN : values.back();
}

EstimateTrace running_trace(const ObservationSample& sample, EstimatorKind kind,
                            const KnownContext& ctx) {
    double t = sample.t.t;
    double theta = 0.0, mu = 0.0, x0 = 0.0, center = 0.0;
    switch (kind) {
        case EstimatorKind::x0:
            theta = require(ctx.theta, "theta", "running_trace[x0]");
            mu = require(ctx.mu, "mu", "running_trace[x0]");
            break;
        case EstimatorKind::mu:
            theta = require(ctx.theta, "theta", "running_trace[mu]");
            x0 = require(ctx.x0, "x0", "running_trace[mu]");
            break;
        case EstimatorKind::theta:
            mu = require(ctx.mu, "mu", "running_trace[theta]");
            x0 = require(ctx.x0, "x0", "running_trace[theta]");
            if (x0 == mu) throw ConfigError("running_trace: x0 must differ from mu");
            break;
        case EstimatorKind::sigma_sq:
            theta = require(ctx.theta, "theta", "running_trace[sigma2]");
            mu = require(ctx.mu, "mu", "running_trace[sigma2]");
            x0 = require(ctx.x0, "x0", "running_trace[sigma2]");
            center = transition_mean(OuParams(theta, mu, 1.0, x0), sample.t);
            break;
    }

    std::size_t n = sample.size();
    EstimateTrace trace;
    trace.values.assign(n, kNaN);
    trace.valid.assign(n, 0);

    KahanAccumulator acc;  // running sum of z (or of squared deviations)
    for (std::size_t i = 0; i < n; ++i) {
        double z = sample.values[i];
        std::size_t count = i + 1;
        try {
            switch (kind) {
                case EstimatorKind::x0:
                    acc.add(z);
                    trace.values[i] =
                        x0_from_mean(acc.value() / static_cast<double>(count), theta, mu, t);
                    break;
                case EstimatorKind::mu:
                    acc.add(z);
                    trace.values[i] =
                        mu_from_mean(acc.value() / static_cast<double>(count), theta, x0, t);
                    break;
                case EstimatorKind::theta:
                    acc.add(z);
                    trace.values[i] =
                        theta_from_mean(acc.value() / static_cast<double>(count), mu, x0, t);
                    break;
                case EstimatorKind::sigma_sq: {
                    double dev = z - center;
                    acc.add(dev * dev);
                    trace.values[i] = sigma_sq_from_sumsq(acc.value(), count, theta, t);
                    break;
                }
            }
            trace.valid[i] = 1;
        } catch (const EstimationError&) {
            ++trace.failures;  // gap; the running sum still includes z
        }
    }

    trace.suffix_min.assign(n, kNaN);
    trace.suffix_max.assign(n, kNaN);
    double lo = kNaN, hi = kNaN;
    for (std::size_t i = n; i-- > 0;) {
        if (trace.valid[i]) {
            double v = trace.values[i];
            lo = std::isnan(lo) ? v : std::min(lo, v);
            hi = std::isnan(hi) ? v : std::max(hi, v);
        }
        trace.suffix_min[i] = lo;
        trace.suffix_max[i] = hi;
    }
    return trace;
}

std::vector<BinCount> equidistribution_counts(
    std::span<const double> seq, std::span<const double> edges,
    const std::function<double(double)>& cdf) {
    if (seq.empty()) throw ConfigError("equidistribution_counts: empty sequence");
    if (edges.size() < 2) throw ConfigError("equidistribution_counts: need >= 2 edges");
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1])) {
            throw ConfigError("equidistribution_counts: edges must be strictly increasing");
        }
    }

    std::size_t nbins = edges.size() - 1;
    std::vector<BinCount> bins(nbins);
    double span = edges.back() - edges.front();
    double n = static_cast<double>(seq.size());
    for (std::size_t i = 0; i < nbins; ++i) {
        bins[i].lo = edges[i];
        bins[i].hi = edges[i + 1];
        bins[i].expected = cdf ? n * (cdf(edges[i + 1]) - cdf(edges[i]))
                               : n * (edges[i + 1] - edges[i]) / span;
    }
    for (double x : seq) {
        if (x < edges.front() || x > edges.back()) continue;
        auto it = std::upper_bound(edges.begin(), edges.end(), x);
        std::size_t idx = (it == edges.end()) ? nbins - 1
                                              : static_cast<std::size_t>(it - edges.begin()) - 1;
        ++bins[idx].count;
    }
    return bins;
}

}  // namespace ou
