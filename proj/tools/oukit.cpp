// Command-line surface for the OU simulation and estimation toolkit.
//
// Subcommands: simulate, estimate, reproduce-tables, experiment, moments,
// equidist. Exit codes: 0 success, 2 argument/configuration error, 3 I/O
// error, 4 estimation-domain error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ou/estimators.hpp"
#include "ou/experiments.hpp"
#include "ou/format.hpp"
#include "ou/gauss.hpp"
#include "ou/io.hpp"
#include "ou/model.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitArgs = 2;
constexpr int kExitIo = 3;
constexpr int kExitEstimation = 4;

struct ModelOpts {
    double theta = 0.5;
    double mu = -3.0;
    double sigma = 1.0;
    double x0 = 3.0;
    double t = 0.5;

    ou::OuParams params() const { return {theta, mu, sigma, x0}; }

    ou::KnownContext context() const {
        ou::KnownContext ctx;
        ctx.theta = theta;
        ctx.mu = mu;
        ctx.sigma = sigma;
        ctx.x0 = x0;
        return ctx;
    }

    std::string key() const {
        return "theta=" + ou::format_double(theta) + "|mu=" + ou::format_double(mu) +
               "|sigma=" + ou::format_double(sigma) + "|x0=" + ou::format_double(x0) +
               "|t=" + ou::format_double(t);
    }
};

struct DriverOpts {
    std::uint64_t seed = 42;
    std::uint64_t weyl_stream = 0;  // 0 means "use the prng arm"

    ou::GaussianDriver make() const {
        return weyl_stream > 0 ? ou::GaussianDriver::weyl(weyl_stream)
                               : ou::GaussianDriver::prng(seed);
    }
};

struct FormatOpts {
    std::string format;  // "", "csv" or "json"
    std::string out;
};

void add_model_flags(CLI::App* cmd, ModelOpts& opts) {
    cmd->add_option("--theta", opts.theta, "Reversion rate (> 0)")
        ->capture_default_str();
    cmd->add_option("--mu", opts.mu, "Equilibrium level")->capture_default_str();
    cmd->add_option("--sigma", opts.sigma, "Volatility (> 0)")->capture_default_str();
    cmd->add_option("--x0", opts.x0, "Initial value")->capture_default_str();
    cmd->add_option("--t", opts.t, "Observation time")->capture_default_str();
}

void add_driver_flags(CLI::App* cmd, DriverOpts& opts) {
    auto* seed = cmd->add_option("--seed", opts.seed, "PRNG seed")->capture_default_str();
    cmd->add_option("--weyl-stream", opts.weyl_stream,
                    "Use the Weyl arm starting at this stream index (>= 1)")
        ->check(CLI::PositiveNumber)
        ->excludes(seed);
}

void add_format_flags(CLI::App* cmd, FormatOpts& opts) {
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", opts.out, "Write output to this path instead of stdout");
    // Unmatched flags (notably --config) climb to the root app.
    cmd->fallthrough();
}

void emit(const FormatOpts& opts, const std::string& content) {
    if (opts.out.empty()) {
        std::cout << content;
    } else {
        ou::io::write_text_file(opts.out, content);
    }
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t comma = csv.find(',', pos);
        std::string item = csv.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ou::ConfigError(std::string(what) + ": cannot parse '" + item + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& csv, const char* what) {
    std::vector<std::size_t> out;
    for (double v : parse_double_list(csv, what)) {
        if (v < 1.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
            throw ou::ConfigError(std::string(what) + ": expected positive integers");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

int cmd_simulate(const ModelOpts& model, const DriverOpts& driver_opts,
                 const FormatOpts& format, const std::string& grid_csv,
                 std::size_t n, std::size_t paths, const std::string& sampler_name,
                 int truncation) {
    ou::OuParams p = model.params();
    ou::GaussianDriver driver = driver_opts.make();
    ou::SamplerKind sampler =
        sampler_name == "fourier" ? ou::SamplerKind::fourier : ou::SamplerKind::exact;
    ou::FourierTruncation trunc(truncation);

    if (!grid_csv.empty()) {
        ou::TrajectoryGrid grid(parse_double_list(grid_csv, "--grid"));
        if (paths < 1) throw ou::ConfigError("--paths must be >= 1");
        std::string hash = ou::fnv1a_hex("simulate-paths|" + model.key() + "|grid=" +
                                         grid_csv + "|paths=" + std::to_string(paths) +
                                         "|driver=" + driver.describe());
        std::vector<std::vector<std::pair<double, double>>> out(paths);
        for (std::size_t j = 0; j < paths; ++j) {
            ou::GaussianDriver path_driver = driver.fork(j);
            out[j] = ou::ou_trajectory(p, grid, path_driver);
        }
        if (format.format == "json") {
            emit(format, ou::io::render_trajectories_json(out, hash, driver.describe()));
        } else {
            emit(format, ou::io::render_trajectories_csv(
                             out, "version=" + std::string(ou::version()) + " config=" +
                                      hash + " driver=" + driver.describe()));
        }
        return kExitOk;
    }

    if (n < 1) throw ou::ConfigError("--n must be >= 1");
    std::string hash = ou::fnv1a_hex("simulate|" + model.key() + "|n=" +
                                     std::to_string(n) + "|driver=" + driver.describe() +
                                     "|sampler=" + sampler_name +
                                     "|trunc=" + std::to_string(truncation));
    std::vector<double> zs = ou::cross_section(p, model.t, n, sampler, driver, trunc);
    if (format.format == "json") {
        emit(format, ou::io::render_observations_json(zs, hash, driver.describe()));
    } else {
        emit(format, ou::io::render_observations_csv(
                         zs, "version=" + std::string(ou::version()) + " config=" + hash +
                                 " driver=" + driver.describe() + " sampler=" +
                                 sampler_name));
    }
    return kExitOk;
}

int cmd_estimate(const ModelOpts& model, const FormatOpts& format,
                 const std::string& input, const std::string& estimator_name) {
    ou::EstimatorKind kind = ou::estimator_from_string(estimator_name);
    ou::io::FixtureSample fixture = ou::io::load_observations(input);
    ou::ObservationSample sample(model.t, fixture.values);
    std::string hash =
        ou::fnv1a_hex("estimate|" + model.key() + "|estimator=" + estimator_name);
    ou::io::EstimateReport report = ou::io::make_estimate_report(
        sample, kind, model.context(), fixture.source, hash);
    emit(format, format.format == "csv" ? ou::io::render_estimate_csv(report)
                                        : ou::io::render_estimate_json(report));
    return report.point_valid ? kExitOk : kExitEstimation;
}

int cmd_reproduce_tables(const ModelOpts& model, const FormatOpts& format,
                         const std::string& fixture_path) {
    ou::io::FixtureSample fixture = ou::io::load_observations(fixture_path);
    std::vector<ou::io::EstimateTable> tables =
        ou::io::reproduce_tables(fixture, model.params(), model.t);
    std::string hash = ou::fnv1a_hex("tables|" + model.key() + "|rows=" +
                                     std::to_string(fixture.values.size()));
    std::string content;
    if (format.format == "csv") {
        content = ou::io::render_tables_csv(tables, hash);
    } else if (format.format == "json") {
        content = ou::io::render_tables_json(tables, hash);
    } else {
        content = ou::io::render_tables_human(tables);
    }
    emit(format, content);
    return kExitOk;
}

int cmd_experiment(const ModelOpts& model, const DriverOpts& driver_opts,
                   const FormatOpts& format, const std::string& sizes_csv,
                   std::size_t replications, const std::string& sampler_name,
                   int truncation, const std::string& estimator_name,
                   unsigned threads) {
    ou::ExperimentConfig cfg{model.params(), ou::TimePoint(model.t)};
    cfg.sample_sizes = parse_size_list(sizes_csv, "--sizes");
    cfg.replications = replications;
    cfg.driver = driver_opts.make();
    cfg.sampler = sampler_name == "fourier" ? ou::SamplerKind::fourier
                                            : ou::SamplerKind::exact;
    cfg.truncation = ou::FourierTruncation(truncation);
    cfg.threads = threads;
    if (!estimator_name.empty()) {
        cfg.estimators = {ou::estimator_from_string(estimator_name)};
    }
    ou::ConsistencyReport report = ou::run_consistency(cfg);
    emit(format, format.format == "csv" ? ou::io::render_consistency_csv(report)
                                        : ou::io::render_consistency_json(report));
    return kExitOk;
}

int cmd_moments(const ModelOpts& model, const DriverOpts& driver_opts,
                const FormatOpts& format, std::size_t n,
                const std::string& sampler_name, int truncation) {
    ou::SamplerKind sampler =
        sampler_name == "fourier" ? ou::SamplerKind::fourier : ou::SamplerKind::exact;
    ou::MomentReport report =
        ou::run_moment_check(model.params(), model.t, n, driver_opts.make(), sampler,
                             ou::FourierTruncation(truncation));
    emit(format, format.format == "csv" ? ou::io::render_moments_csv(report)
                                        : ou::io::render_moments_json(report));
    return kExitOk;
}

int cmd_equidist(const DriverOpts& driver_opts, const FormatOpts& format,
                 std::size_t n, std::size_t bins) {
    ou::EquidistReport report =
        ou::run_equidistribution_check(driver_opts.make(), n, bins);
    emit(format, format.format == "csv" ? ou::io::render_equidist_csv(report)
                                        : ou::io::render_equidist_json(report));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ornstein-Uhlenbeck simulation and cross-sectional estimation toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ou::version());
    app.set_config("--config", "",
                   "Config file with per-subcommand sections, e.g. [simulate]");

    int exit_code = kExitOk;

    // simulate
    auto* sim = app.add_subcommand(
        "simulate", "Sample cross-sectional observations or grid trajectories");
    ModelOpts sim_model;
    DriverOpts sim_driver;
    FormatOpts sim_format;
    std::size_t sim_n = 100, sim_paths = 1;
    std::string sim_grid, sim_sampler = "exact";
    int sim_trunc = 800;
    add_model_flags(sim, sim_model);
    add_driver_flags(sim, sim_driver);
    add_format_flags(sim, sim_format);
    sim->add_option("--n", sim_n, "Number of observations")->capture_default_str();
    sim->add_option("--grid", sim_grid,
                    "Comma-separated times; switches to trajectory output");
    sim->add_option("--paths", sim_paths, "Trajectories to sample on the grid")
        ->capture_default_str();
    sim->add_option("--sampler", sim_sampler, "Observation sampler")
        ->check(CLI::IsMember({"exact", "fourier"}))
        ->capture_default_str();
    sim->add_option("--truncation", sim_trunc, "Fourier series cutoff")
        ->capture_default_str();
    sim->callback([&] {
        exit_code = cmd_simulate(sim_model, sim_driver, sim_format, sim_grid, sim_n,
                                 sim_paths, sim_sampler, sim_trunc);
    });

    // estimate
    auto* est = app.add_subcommand("estimate",
                                   "Run one estimator over an observation file");
    ModelOpts est_model;
    FormatOpts est_format;
    std::string est_input, est_name;
    add_model_flags(est, est_model);
    add_format_flags(est, est_format);
    est->add_option("input", est_input, "Observation CSV (k,z)")->required();
    est->add_option("--estimator", est_name, "Which parameter to estimate")
        ->check(CLI::IsMember({"x0", "mu", "theta", "sigma2"}))
        ->required();
    est->callback(
        [&] { exit_code = cmd_estimate(est_model, est_format, est_input, est_name); });

    // reproduce-tables
    auto* tab = app.add_subcommand(
        "reproduce-tables",
        "Evaluate all four estimators on the bundled reference sample at n=5,10,...");
    ModelOpts tab_model;
    FormatOpts tab_format;
    std::string tab_fixture = OUKIT_DEFAULT_FIXTURE;
    add_model_flags(tab, tab_model);
    add_format_flags(tab, tab_format);
    tab->add_option("--fixture", tab_fixture, "Observation CSV to tabulate")
        ->capture_default_str();
    tab->callback(
        [&] { exit_code = cmd_reproduce_tables(tab_model, tab_format, tab_fixture); });

    // experiment
    auto* exp = app.add_subcommand("experiment",
                                   "Replicated estimator-consistency experiment");
    ModelOpts exp_model;
    DriverOpts exp_driver;
    FormatOpts exp_format;
    std::string exp_sizes = "100,1000,10000", exp_sampler = "exact", exp_estimator;
    std::size_t exp_reps = 200;
    int exp_trunc = 800;
    unsigned exp_threads = 1;
    add_model_flags(exp, exp_model);
    add_driver_flags(exp, exp_driver);
    add_format_flags(exp, exp_format);
    exp->add_option("--sizes", exp_sizes, "Comma-separated sample sizes")
        ->capture_default_str();
    exp->add_option("--replications", exp_reps, "Replications per size")
        ->capture_default_str();
    exp->add_option("--sampler", exp_sampler, "Observation sampler")
        ->check(CLI::IsMember({"exact", "fourier"}))
        ->capture_default_str();
    exp->add_option("--truncation", exp_trunc, "Fourier series cutoff")
        ->capture_default_str();
    exp->add_option("--estimator", exp_estimator, "Restrict to one estimator")
        ->check(CLI::IsMember({"x0", "mu", "theta", "sigma2"}));
    exp->add_option("--threads", exp_threads, "Worker threads")->capture_default_str();
    exp->callback([&] {
        exit_code = cmd_experiment(exp_model, exp_driver, exp_format, exp_sizes,
                                   exp_reps, exp_sampler, exp_trunc, exp_estimator,
                                   exp_threads);
    });

    // moments
    auto* mom = app.add_subcommand("moments",
                                   "Monte Carlo moment check against the closed forms");
    ModelOpts mom_model;
    DriverOpts mom_driver;
    FormatOpts mom_format;
    std::size_t mom_n = 100000;
    std::string mom_sampler = "exact";
    int mom_trunc = 800;
    add_model_flags(mom, mom_model);
    add_driver_flags(mom, mom_driver);
    add_format_flags(mom, mom_format);
    mom->add_option("--n", mom_n, "Number of observations")->capture_default_str();
    mom->add_option("--sampler", mom_sampler, "Observation sampler")
        ->check(CLI::IsMember({"exact", "fourier"}))
        ->capture_default_str();
    mom->add_option("--truncation", mom_trunc, "Fourier series cutoff")
        ->capture_default_str();
    mom->callback([&] {
        exit_code =
            cmd_moments(mom_model, mom_driver, mom_format, mom_n, mom_sampler, mom_trunc);
    });

    // equidist
    auto* eq = app.add_subcommand("equidist",
                                  "Bin-count diagnostic of a driver's streams");
    DriverOpts eq_driver;
    FormatOpts eq_format;
    std::size_t eq_n = 10000, eq_bins = 10;
    add_driver_flags(eq, eq_driver);
    add_format_flags(eq, eq_format);
    eq->add_option("--n", eq_n, "Stream length")->capture_default_str();
    eq->add_option("--bins", eq_bins, "Number of bins")->capture_default_str();
    eq->callback(
        [&] { exit_code = cmd_equidist(eq_driver, eq_format, eq_n, eq_bins); });

    try {
        app.parse(argc, argv);
        return exit_code;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitArgs;
    } catch (const ou::EstimationError& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return kExitEstimation;
    } catch (const ou::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ou::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitArgs;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
