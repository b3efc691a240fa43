#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ou/model.hpp"
#include "ou/summation.hpp"

namespace ou {

// Cross-sectional observations z_1..z_n at a fixed time t > 0, in insertion
// order (the running traces are order-dependent).
struct ObservationSample {
    TimePoint t;
    std::vector<double> values;

    ObservationSample(TimePoint t, std::vector<double> values);

    std::size_t size() const noexcept { return values.size(); }
};

// The parameters a given estimator assumes known. Each estimator checks for
// exactly the fields it needs and rejects otherwise.
struct KnownContext {
    std::optional<double> theta;
    std::optional<double> mu;
    std::optional<double> sigma;
    std::optional<double> x0;
};

enum class EstimatorKind { x0, mu, theta, sigma_sq };

const char* to_string(EstimatorKind kind) noexcept;
EstimatorKind estimator_from_string(std::string_view name);

// T_n = e^{theta t} mean(z) - mu e^{theta t} (1 - e^{-theta t}).
// Needs theta, mu.
double estimate_x0(const ObservationSample& sample, const KnownContext& ctx);

// T*_n = (mean(z) - x0 e^{-theta t}) / (1 - e^{-theta t}). Needs theta, x0.
double estimate_mu(const ObservationSample& sample, const KnownContext& ctx);

// T**_n = -(1/t) ln((mean(z) - mu) / (x0 - mu)). Needs mu, x0 with
// x0 != mu; throws EstimationError (with the ratio) when the log argument
// is nonpositive.
double estimate_theta(const ObservationSample& sample, const KnownContext& ctx);

// T***_n = 2 theta sum_k (z_k - m_t)^2 / (n (1 - e^{-2 theta t})), where
// m_t = x0 e^{-theta t} + mu (1 - e^{-theta t}). Needs theta, mu, x0.
// Always >= 0.
double estimate_sigma_sq(const ObservationSample& sample, const KnownContext& ctx);

double estimate(EstimatorKind kind, const ObservationSample& sample,
                const KnownContext& ctx);

// Running estimates T_1..T_n with suffix min/max tails (finite stand-ins for
// liminf/limsup). Prefixes on which the estimator leaves its domain are
// recorded as gaps, not values; the final entry, when valid, equals the
// point estimator on the full sample bit-for-bit.
struct EstimateTrace {
    std::vector<double> values;        // values[i] = T_{i+1}; NaN at gaps
    std::vector<std::uint8_t> valid;   // 0 marks a gap
    std::vector<double> suffix_min;    // min over valid entries at index >= i
    std::vector<double> suffix_max;
    std::size_t failures = 0;

    double last() const;
};

EstimateTrace running_trace(const ObservationSample& sample, EstimatorKind kind,
                            const KnownContext& ctx);

// Counting-measure diagnostic: how many sequence elements land in each
// [edges[i], edges[i+1]) bin (last bin closed), against n (F(hi) - F(lo)).
// With no CDF the expectation is uniform over the edges' span.
struct BinCount {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double expected = 0.0;
};

std::vector<BinCount> equidistribution_counts(
    std::span<const double> seq, std::span<const double> edges,
    const std::function<double(double)>& cdf = {});

}  // namespace ou
