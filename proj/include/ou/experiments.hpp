#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ou/estimators.hpp"
#include "ou/gauss.hpp"

namespace ou {

// A replicated estimator-consistency experiment. Replications are keyed by
// (size index, replication index) to forked driver streams, so the report is
// identical at any thread count.
struct ExperimentConfig {
    OuParams params;
    TimePoint t;

    ExperimentConfig(OuParams params_, TimePoint t_) : params(params_), t(t_) {}
    std::vector<std::size_t> sample_sizes;  // strictly increasing
    std::size_t replications = 1;
    GaussianDriver driver = GaussianDriver::prng(42);
    SamplerKind sampler = SamplerKind::exact;
    FourierTruncation truncation{};
    std::vector<EstimatorKind> estimators{EstimatorKind::x0, EstimatorKind::mu,
                                          EstimatorKind::theta, EstimatorKind::sigma_sq};
    unsigned threads = 1;

    void validate() const;
    // Canonical text form fed to the config hash. Excludes the thread count:
    // parallelism must not change the report.
    std::string canonical() const;
};

struct ConsistencyCell {
    EstimatorKind estimator = EstimatorKind::x0;
    std::size_t sample_size = 0;
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t failures = 0;     // estimator left its domain (theta ratio <= 0)
    std::size_t replications = 0;
};

struct ConsistencyReport {
    std::string version;
    std::string config_hash;
    std::string driver;
    std::string sampler;
    std::vector<ConsistencyCell> cells;
};

ConsistencyReport run_consistency(const ExperimentConfig& cfg);

struct MomentReport {
    std::string version;
    std::string config_hash;
    std::string driver;
    std::string sampler;
    std::size_t n = 0;
    double sample_mean = 0.0;
    double sample_variance = 0.0;
    double closed_mean = 0.0;
    double closed_variance = 0.0;
    double z_mean = 0.0;
    double z_variance = 0.0;
    bool flagged = false;  // |z| > 4 on either moment
};

// Monte Carlo agreement of the sampled cross-section with the closed-form
// transition mean and variance. Requires n >= 1000.
MomentReport run_moment_check(const OuParams& p, TimePoint t, std::size_t n,
                              const GaussianDriver& driver_spec, SamplerKind sampler,
                              const FourierTruncation& trunc = {});

struct CovarianceReport {
    std::string version;
    std::string config_hash;
    std::string driver;
    double s = 0.0;
    double t = 0.0;
    std::size_t n_paths = 0;
    double sample_cov = 0.0;
    double closed_cov = 0.0;
    double std_error = 0.0;
    double z = 0.0;
    bool flagged = false;  // beyond 5 standard errors
};

// Two-point exact paths (x_s, x_t) against the closed-form covariance.
// Requires 0 < s <= t and n_paths >= 10^4.
CovarianceReport run_covariance_check(const OuParams& p, TimePoint s, TimePoint t,
                                      std::size_t n_paths,
                                      const GaussianDriver& driver_spec);

struct EquidistBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double expected = 0.0;
    double z = 0.0;  // (count - expected) / sqrt(n p (1-p))
};

struct EquidistReport {
    std::string version;
    std::string config_hash;
    std::string driver;
    std::size_t n = 0;
    std::vector<EquidistBin> uniform_bins;    // driver uniforms vs equal bins of (0,1)
    std::vector<EquidistBin> gaussian_bins;   // transported draws vs Phi-quantile bins
    double max_abs_z_uniform = 0.0;
    double max_abs_z_gaussian = 0.0;
};

// Bin-count diagnostic of a driver's uniform deviates and of their
// inverse-CDF transports. Requires n >= 1000 and bins >= 2.
EquidistReport run_equidistribution_check(const GaussianDriver& driver_spec,
                                          std::size_t n, std::size_t bins);

// Kolmogorov-Smirnov statistic sup_x |F_n(x) - F(x)| of a sample against a
// reference CDF.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

}  // namespace ou
