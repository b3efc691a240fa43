#include "ou/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "ou/format.hpp"

namespace ou {

namespace {

std::string params_key(const OuParams& p, double t) {
    std::ostringstream os;
    os << "theta=" << format_double(p.theta) << "|mu=" << format_double(p.mu)
       << "|sigma=" << format_double(p.sigma) << "|x0=" << format_double(p.x0)
       << "|t=" << format_double(t);
    return os.str();
}

double true_value(EstimatorKind kind, const OuParams& p) {
    switch (kind) {
        case EstimatorKind::x0: return p.x0;
        case EstimatorKind::mu: return p.mu;
        case EstimatorKind::theta: return p.theta;
        case EstimatorKind::sigma_sq: return p.sigma * p.sigma;
    }
    return 0.0;
}

KnownContext full_context(const OuParams& p) {
    KnownContext ctx;
    ctx.theta = p.theta;
    ctx.mu = p.mu;
    ctx.sigma = p.sigma;
    ctx.x0 = p.x0;
    return ctx;
}

// Driver for task (size index, replication index). Weyl streams are strided
// by the sample size so a fourier run can fork one stream per observation
// without colliding with any other task.
GaussianDriver task_driver(const ExperimentConfig& cfg, std::size_t size_idx,
                           std::size_t rep_idx) {
    if (cfg.driver.kind() == GaussianDriver::Kind::weyl) {
        std::uint64_t offset = 0;
        for (std::size_t s = 0; s < size_idx; ++s) {
            offset += cfg.replications * cfg.sample_sizes[s];
        }
        offset += rep_idx * cfg.sample_sizes[size_idx];
        return cfg.driver.fork(offset);
    }
    return cfg.driver.fork(size_idx * cfg.replications + rep_idx);
}

struct ReplicationOutcome {
    std::array<double, 4> value{};
    std::array<std::uint8_t, 4> ok{};
};

// Two-pass sample variance with fixed-order compensated sums.
double sample_variance(std::span<const double> xs, double mean) {
    KahanAccumulator sq;
    for (double x : xs) {
        double d = x - mean;
        sq.add(d * d);
    }
    return sq.value() / static_cast<double>(xs.size() - 1);
}

}  // namespace

void ExperimentConfig::validate() const {
    if (!(t.t > 0.0)) throw ConfigError("ExperimentConfig: t must be positive");
    if (sample_sizes.empty()) throw ConfigError("ExperimentConfig: no sample sizes");
    for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
        if (sample_sizes[i] < 1) throw ConfigError("ExperimentConfig: sample sizes must be >= 1");
        if (i > 0 && sample_sizes[i] <= sample_sizes[i - 1]) {
            throw ConfigError("ExperimentConfig: sample sizes must be strictly increasing");
        }
    }
    if (replications < 1) throw ConfigError("ExperimentConfig: replications must be >= 1");
    if (estimators.empty()) throw ConfigError("ExperimentConfig: no estimators selected");
    if (estimators.size() > 4) throw ConfigError("ExperimentConfig: too many estimators");
    if (threads < 1) throw ConfigError("ExperimentConfig: threads must be >= 1");
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    os << "consistency|" << params_key(params, t.t) << "|sizes=";
    for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
        os << (i ? "," : "") << sample_sizes[i];
    }
    os << "|reps=" << replications << "|driver=" << driver.describe()
       << "|sampler=" << to_string(sampler) << "|trunc=" << truncation.n_terms << "|est=";
    for (std::size_t i = 0; i < estimators.size(); ++i) {
        os << (i ? "," : "") << to_string(estimators[i]);
    }
    return os.str();
}

ConsistencyReport run_consistency(const ExperimentConfig& cfg) {
    cfg.validate();

    const std::size_t n_sizes = cfg.sample_sizes.size();
    const std::size_t reps = cfg.replications;
    const std::size_t n_tasks = n_sizes * reps;
    const KnownContext ctx = full_context(cfg.params);

    std::vector<ReplicationOutcome> outcomes(n_tasks);

    auto run_task = [&](std::size_t task) {
        std::size_t size_idx = task / reps;
        std::size_t rep_idx = task % reps;
        GaussianDriver driver = task_driver(cfg, size_idx, rep_idx);
        std::vector<double> zs = cross_section(cfg.params, cfg.t,
                                               cfg.sample_sizes[size_idx], cfg.sampler,
                                               driver, cfg.truncation);
        ObservationSample sample(cfg.t, std::move(zs));
        ReplicationOutcome& out = outcomes[task];
        for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
            try {
                out.value[e] = estimate(cfg.estimators[e], sample, ctx);
                out.ok[e] = 1;
            } catch (const EstimationError&) {
                out.ok[e] = 0;
            }
        }
    };

    unsigned workers = std::min<unsigned>(cfg.threads, static_cast<unsigned>(n_tasks));
    if (workers <= 1) {
        for (std::size_t task = 0; task < n_tasks; ++task) run_task(task);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t task = w; task < n_tasks; task += workers) {
                        run_task(task);
                    }
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }

    // Deterministic reduction in replication-index order.
    ConsistencyReport report;
    report.version = version();
    report.config_hash = fnv1a_hex(cfg.canonical());
    report.driver = cfg.driver.describe();
    report.sampler = to_string(cfg.sampler);
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
        double truth = true_value(cfg.estimators[e], cfg.params);
        for (std::size_t s = 0; s < n_sizes; ++s) {
            ConsistencyCell cell;
            cell.estimator = cfg.estimators[e];
            cell.sample_size = cfg.sample_sizes[s];
            cell.replications = reps;
            KahanAccumulator abs_err, sq_err;
            std::size_t ok_count = 0;
            for (std::size_t r = 0; r < reps; ++r) {
                const ReplicationOutcome& out = outcomes[s * reps + r];
                if (!out.ok[e]) {
                    ++cell.failures;
                    continue;
                }
                double err = out.value[e] - truth;
                abs_err.add(std::abs(err));
                sq_err.add(err * err);
                ++ok_count;
            }
            if (ok_count > 0) {
                cell.mae = abs_err.value() / static_cast<double>(ok_count);
                cell.rmse = std::sqrt(sq_err.value() / static_cast<double>(ok_count));
            }
            report.cells.push_back(cell);
        }
    }
    return report;
}

MomentReport run_moment_check(const OuParams& p, TimePoint t, std::size_t n,
                              const GaussianDriver& driver_spec, SamplerKind sampler,
                              const FourierTruncation& trunc) {
    if (n < 1000) throw ConfigError("run_moment_check: need n >= 1000");
    GaussianDriver driver = driver_spec;
    std::vector<double> zs = cross_section(p, t, n, sampler, driver, trunc);

    MomentReport rep;
    rep.version = version();
    rep.config_hash = fnv1a_hex("moments|" + params_key(p, t.t) + "|n=" + std::to_string(n) +
                                "|driver=" + driver_spec.describe() + "|sampler=" +
                                to_string(sampler) + "|trunc=" + std::to_string(trunc.n_terms));
    rep.driver = driver_spec.describe();
    rep.sampler = to_string(sampler);
    rep.n = n;
    rep.sample_mean = kahan_sum(zs) / static_cast<double>(n);
    rep.sample_variance = sample_variance(zs, rep.sample_mean);
    rep.closed_mean = transition_mean(p, t);
    rep.closed_variance = transition_variance(p, t);
    double se_mean = std::sqrt(rep.closed_variance / static_cast<double>(n));
    double se_var = rep.closed_variance * std::sqrt(2.0 / static_cast<double>(n - 1));
    rep.z_mean = se_mean > 0.0 ? (rep.sample_mean - rep.closed_mean) / se_mean : 0.0;
    rep.z_variance = se_var > 0.0 ? (rep.sample_variance - rep.closed_variance) / se_var : 0.0;
    rep.flagged = std::abs(rep.z_mean) > 4.0 || std::abs(rep.z_variance) > 4.0;
    return rep;
}

CovarianceReport run_covariance_check(const OuParams& p, TimePoint s, TimePoint t,
                                      std::size_t n_paths,
                                      const GaussianDriver& driver_spec) {
    if (!(s.t > 0.0) || s.t > t.t) {
        throw ConfigError("run_covariance_check: need 0 < s <= t");
    }
    if (n_paths < 10000) throw ConfigError("run_covariance_check: need n_paths >= 10^4");

    GaussianDriver driver = driver_spec;
    std::vector<double> xs(n_paths), xt(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
        xs[i] = exact_step(p, p.x0, s.t, driver.next());
        xt[i] = (t.t > s.t) ? exact_step(p, xs[i], t.t - s.t, driver.next()) : xs[i];
    }

    double mean_s = kahan_sum(xs) / static_cast<double>(n_paths);
    double mean_t = kahan_sum(xt) / static_cast<double>(n_paths);
    KahanAccumulator cross;
    for (std::size_t i = 0; i < n_paths; ++i) {
        cross.add((xs[i] - mean_s) * (xt[i] - mean_t));
    }

    CovarianceReport rep;
    rep.version = version();
    rep.config_hash = fnv1a_hex("covariance|" + params_key(p, t.t) + "|s=" +
                                format_double(s.t) + "|paths=" + std::to_string(n_paths) +
                                "|driver=" + driver_spec.describe());
    rep.driver = driver_spec.describe();
    rep.s = s.t;
    rep.t = t.t;
    rep.n_paths = n_paths;
    rep.sample_cov = cross.value() / static_cast<double>(n_paths - 1);
    rep.closed_cov = covariance(p, s, t);
    // Delta-method standard error for the covariance of a bivariate normal.
    double var_s = transition_variance(p, s);
    double var_t = transition_variance(p, t);
    rep.std_error = std::sqrt((var_s * var_t + rep.closed_cov * rep.closed_cov) /
                              static_cast<double>(n_paths));
    rep.z = rep.std_error > 0.0 ? (rep.sample_cov - rep.closed_cov) / rep.std_error : 0.0;
    rep.flagged = std::abs(rep.z) > 5.0;
    return rep;
}

EquidistReport run_equidistribution_check(const GaussianDriver& driver_spec,
                                          std::size_t n, std::size_t bins) {
    if (n < 1000) throw ConfigError("run_equidistribution_check: need n >= 1000");
    if (bins < 2) throw ConfigError("run_equidistribution_check: need bins >= 2");

    EquidistReport rep;
    rep.version = version();
    rep.config_hash = fnv1a_hex("equidist|driver=" + driver_spec.describe() + "|n=" +
                                std::to_string(n) + "|bins=" + std::to_string(bins));
    rep.driver = driver_spec.describe();
    rep.n = n;

    // The same underlying uniforms feed both sides: raw against equal bins,
    // inverse-CDF transports against Phi-quantile bins.
    GaussianDriver uniform_source = driver_spec;
    std::vector<double> us(n);
    for (auto& u : us) u = uniform_source.next_uniform();
    GaussianDriver normal_source = driver_spec;
    std::vector<double> zs = normal_source.take(n);

    std::vector<double> uedges(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        uedges[i] = static_cast<double>(i) / static_cast<double>(bins);
    }
    std::vector<double> gedges(bins + 1);
    gedges.front() = -12.0;  // beyond any draw either arm can produce
    gedges.back() = 12.0;
    for (std::size_t i = 1; i < bins; ++i) {
        gedges[i] = inv_normal_cdf(static_cast<double>(i) / static_cast<double>(bins));
    }

    auto standardize = [n](std::vector<BinCount> counts, double* max_abs_z) {
        std::vector<EquidistBin> out;
        out.reserve(counts.size());
        *max_abs_z = 0.0;
        for (const BinCount& b : counts) {
            EquidistBin bin;
            bin.lo = b.lo;
            bin.hi = b.hi;
            bin.count = b.count;
            bin.expected = b.expected;
            double prob = b.expected / static_cast<double>(n);
            double sd = std::sqrt(static_cast<double>(n) * prob * (1.0 - prob));
            bin.z = sd > 0.0 ? (static_cast<double>(b.count) - b.expected) / sd : 0.0;
            *max_abs_z = std::max(*max_abs_z, std::abs(bin.z));
            out.push_back(bin);
        }
        return out;
    };

    rep.uniform_bins = standardize(equidistribution_counts(us, uedges),
                                   &rep.max_abs_z_uniform);
    rep.gaussian_bins = standardize(
        equidistribution_counts(zs, gedges, [](double x) { return normal_cdf(x); }),
        &rep.max_abs_z_gaussian);
    return rep;
}

double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf) {
    if (sample.empty()) throw ConfigError("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i]);
        d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - f,
                                 f - static_cast<double>(i) / n));
    }
    return d;
}

}  // namespace ou
