#include "ou/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ou/format.hpp"

namespace ou::io {

namespace {

using ordered_json = nlohmann::ordered_json;

bool parse_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

bool parse_size(std::string_view s, std::size_t& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

// null for non-finite values so gap markers survive JSON.
ordered_json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

ordered_json trace_rows(const EstimateTrace& trace) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
        ordered_json row;
        row["n"] = i + 1;
        row["value"] = trace.valid[i] ? json_number(trace.values[i]) : ordered_json(nullptr);
        row["suffix_min"] = json_number(trace.suffix_min[i]);
        row["suffix_max"] = json_number(trace.suffix_max[i]);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

FixtureSample load_observations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    FixtureSample fixture;
    fixture.source = path.string();
    std::string raw;
    bool header_seen = false;
    std::size_t expected_k = 1;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view line = strip_cr(raw);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != "k,z") {
                throw IoError(path.string() + ":" + std::to_string(lineno) +
                              ": expected header 'k,z'");
            }
            header_seen = true;
            continue;
        }
        std::size_t comma = line.find(',');
        std::size_t k = 0;
        double z = 0.0;
        if (comma == std::string_view::npos ||
            !parse_size(line.substr(0, comma), k) ||
            !parse_double(line.substr(comma + 1), z)) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
        }
        if (k != expected_k) {
            throw IoError(path.string() + ":" + std::to_string(lineno) +
                          ": indices must be contiguous from 1, got " + std::to_string(k));
        }
        if (!std::isfinite(z)) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": non-finite value");
        }
        ++expected_k;
        fixture.values.push_back(z);
    }
    if (!header_seen) throw IoError(path.string() + ": missing 'k,z' header");
    if (fixture.values.empty()) throw IoError(path.string() + ": no observations");
    return fixture;
}

std::string render_observations_csv(std::span<const double> values,
                                    const std::string& meta) {
    std::ostringstream os;
    if (!meta.empty()) os << "# " << meta << "\n";
    os << "k,z\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        os << (i + 1) << "," << format_double(values[i]) << "\n";
    }
    return os.str();
}

std::string render_observations_json(std::span<const double> values,
                                     const std::string& config_hash,
                                     const std::string& driver) {
    ordered_json doc;
    doc["version"] = version();
    doc["config_hash"] = config_hash;
    doc["driver"] = driver;
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < values.size(); ++i) {
        rows.push_back(ordered_json{{"k", i + 1}, {"z", values[i]}});
    }
    doc["results"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string render_trajectories_csv(
    const std::vector<std::vector<std::pair<double, double>>>& paths,
    const std::string& meta) {
    std::ostringstream os;
    if (!meta.empty()) os << "# " << meta << "\n";
    os << "path_id,t,x\n";
    for (std::size_t id = 0; id < paths.size(); ++id) {
        for (const auto& [t, x] : paths[id]) {
            os << id << "," << format_double(t) << "," << format_double(x) << "\n";
        }
    }
    return os.str();
}

std::string render_trajectories_json(
    const std::vector<std::vector<std::pair<double, double>>>& paths,
    const std::string& config_hash, const std::string& driver) {
    ordered_json doc;
    doc["version"] = version();
    doc["config_hash"] = config_hash;
    doc["driver"] = driver;
    ordered_json rows = ordered_json::array();
    for (std::size_t id = 0; id < paths.size(); ++id) {
        for (const auto& [t, x] : paths[id]) {
            rows.push_back(ordered_json{{"path_id", id}, {"t", t}, {"x", x}});
        }
    }
    doc["results"] = std::move(rows);
    return doc.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<EstimateTable> reproduce_tables(const FixtureSample& fixture,
                                            const OuParams& params, TimePoint t) {
    if (fixture.values.size() < 5) {
        throw IoError(fixture.source + ": fixture too small, need at least 5 rows");
    }
    ObservationSample sample(t, fixture.values);
    KnownContext ctx;
    ctx.theta = params.theta;
    ctx.mu = params.mu;
    ctx.sigma = params.sigma;
    ctx.x0 = params.x0;

    const EstimatorKind kinds[] = {EstimatorKind::x0, EstimatorKind::mu,
                                   EstimatorKind::theta, EstimatorKind::sigma_sq};
    const double truths[] = {params.x0, params.mu, params.theta,
                             params.sigma * params.sigma};

    std::vector<EstimateTable> tables;
    for (std::size_t i = 0; i < 4; ++i) {
        EstimateTable table;
        table.estimator = kinds[i];
        table.true_value = truths[i];
        EstimateTrace trace = running_trace(sample, kinds[i], ctx);
        for (std::size_t n = 5; n <= sample.size(); n += 5) {
            table.rows.emplace_back(n, trace.values[n - 1]);
        }
        tables.push_back(std::move(table));
    }
    return tables;
}

std::string render_tables_human(const std::vector<EstimateTable>& tables) {
    std::ostringstream os;
    for (const EstimateTable& table : tables) {
        os << "estimator " << to_string(table.estimator) << " (true value "
           << format_double(table.true_value) << ")\n";
        os << "      n      statistic\n";
        char buf[64];
        for (const auto& [n, value] : table.rows) {
            std::snprintf(buf, sizeof buf, "  %5zu   %12.9f\n", n, value);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

std::string render_tables_csv(const std::vector<EstimateTable>& tables,
                              const std::string& config_hash) {
    std::ostringstream os;
    os << "# version=" << version() << " config=" << config_hash << "\n";
    os << "estimator,n,value\n";
    for (const EstimateTable& table : tables) {
        for (const auto& [n, value] : table.rows) {
            os << to_string(table.estimator) << "," << n << "," << format_double(value)
               << "\n";
        }
    }
    return os.str();
}

std::string render_tables_json(const std::vector<EstimateTable>& tables,
                               const std::string& config_hash) {
    ordered_json doc;
    doc["version"] = version();
    doc["config_hash"] = config_hash;
    ordered_json results = ordered_json::array();
    for (const EstimateTable& table : tables) {
        ordered_json rows = ordered_json::array();
        for (const auto& [n, value] : table.rows) {
            rows.push_back(ordered_json{{"n", n}, {"value", json_number(value)}});
        }
        results.push_back(ordered_json{{"estimator", to_string(table.estimator)},
                                       {"true_value", table.true_value},
                                       {"rows", std::move(rows)}});
    }
    doc["results"] = std::move(results);
    return doc.dump(2) + "\n";
}

EstimateReport make_estimate_report(const ObservationSample& sample,
                                    EstimatorKind kind, const KnownContext& ctx,
                                    const std::string& source,
                                    const std::string& config_hash) {
    EstimateReport report;
    report.version = version();
    report.config_hash = config_hash;
    report.estimator = to_string(kind);
    report.source = source;
    report.t = sample.t.t;
    report.n = sample.size();
    report.trace = running_trace(sample, kind, ctx);
    try {
        report.point_estimate = estimate(kind, sample, ctx);
        report.point_valid = true;
    } catch (const EstimationError& e) {
        report.point_valid = false;
        report.failure_ratio = e.ratio();
    }
    return report;
}

std::string render_estimate_json(const EstimateReport& report) {
    ordered_json doc;
    doc["version"] = report.version;
    doc["config_hash"] = report.config_hash;
    doc["estimator"] = report.estimator;
    doc["source"] = report.source;
    doc["t"] = report.t;
    doc["n"] = report.n;
    doc["point_estimate"] =
        report.point_valid ? json_number(report.point_estimate) : ordered_json(nullptr);
    if (!report.point_valid) doc["failure_ratio"] = report.failure_ratio;
    doc["trace_failures"] = report.trace.failures;
    doc["results"] = trace_rows(report.trace);
    return doc.dump(2) + "\n";
}

std::string render_estimate_csv(const EstimateReport& report) {
    std::ostringstream os;
    os << "# version=" << report.version << " config=" << report.config_hash
       << " estimator=" << report.estimator << " source=" << report.source << "\n";
    os << "n,value,suffix_min,suffix_max\n";
    const EstimateTrace& trace = report.trace;
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
        os << (i + 1) << "," << (trace.valid[i] ? format_double(trace.values[i]) : "nan")
           << "," << format_double(trace.suffix_min[i]) << ","
           << format_double(trace.suffix_max[i]) << "\n";
    }
    return os.str();
}

std::string render_consistency_json(const ConsistencyReport& report) {
    ordered_json doc;
    doc["version"] = report.version;
    doc["config_hash"] = report.config_hash;
    doc["driver"] = report.driver;
    doc["sampler"] = report.sampler;
    ordered_json rows = ordered_json::array();
    for (const ConsistencyCell& cell : report.cells) {
        rows.push_back(ordered_json{{"estimator", to_string(cell.estimator)},
                                    {"n", cell.sample_size},
                                    {"mae", cell.mae},
                                    {"rmse", cell.rmse},
                                    {"failures", cell.failures},
                                    {"replications", cell.replications}});
    }
    doc["results"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string render_consistency_csv(const ConsistencyReport& report) {
    std::ostringstream os;
    os << "# version=" << report.version << " config=" << report.config_hash
       << " driver=" << report.driver << " sampler=" << report.sampler << "\n";
    os << "estimator,n,mae,rmse,failures,replications\n";
    for (const ConsistencyCell& cell : report.cells) {
        os << to_string(cell.estimator) << "," << cell.sample_size << ","
           << format_double(cell.mae) << "," << format_double(cell.rmse) << ","
           << cell.failures << "," << cell.replications << "\n";
    }
    return os.str();
}

std::string render_moments_json(const MomentReport& report) {
    ordered_json doc;
    doc["version"] = report.version;
    doc["config_hash"] = report.config_hash;
    doc["driver"] = report.driver;
    doc["sampler"] = report.sampler;
    doc["results"] = ordered_json::array(
        {ordered_json{{"n", report.n},
                      {"sample_mean", report.sample_mean},
                      {"sample_variance", report.sample_variance},
                      {"closed_mean", report.closed_mean},
                      {"closed_variance", report.closed_variance},
                      {"z_mean", report.z_mean},
                      {"z_variance", report.z_variance},
                      {"flagged", report.flagged}}});
    return doc.dump(2) + "\n";
}

std::string render_moments_csv(const MomentReport& report) {
    std::ostringstream os;
    os << "# version=" << report.version << " config=" << report.config_hash
       << " driver=" << report.driver << " sampler=" << report.sampler << "\n";
    os << "n,sample_mean,sample_variance,closed_mean,closed_variance,z_mean,z_variance,"
          "flagged\n";
    os << report.n << "," << format_double(report.sample_mean) << ","
       << format_double(report.sample_variance) << "," << format_double(report.closed_mean)
       << "," << format_double(report.closed_variance) << ","
       << format_double(report.z_mean) << "," << format_double(report.z_variance) << ","
       << (report.flagged ? 1 : 0) << "\n";
    return os.str();
}

std::string render_covariance_json(const CovarianceReport& report) {
    ordered_json doc;
    doc["version"] = report.version;
    doc["config_hash"] = report.config_hash;
    doc["driver"] = report.driver;
    doc["results"] = ordered_json::array(
        {ordered_json{{"s", report.s},
                      {"t", report.t},
                      {"n_paths", report.n_paths},
                      {"sample_cov", report.sample_cov},
                      {"closed_cov", report.closed_cov},
                      {"std_error", report.std_error},
                      {"z", report.z},
                      {"flagged", report.flagged}}});
    return doc.dump(2) + "\n";
}

std::string render_covariance_csv(const CovarianceReport& report) {
    std::ostringstream os;
    os << "# version=" << report.version << " config=" << report.config_hash
       << " driver=" << report.driver << "\n";
    os << "s,t,n_paths,sample_cov,closed_cov,std_error,z,flagged\n";
    os << format_double(report.s) << "," << format_double(report.t) << "," << report.n_paths
       << "," << format_double(report.sample_cov) << "," << format_double(report.closed_cov)
       << "," << format_double(report.std_error) << "," << format_double(report.z) << ","
       << (report.flagged ? 1 : 0) << "\n";
    return os.str();
}

namespace {

ordered_json equidist_bins_json(const std::vector<EquidistBin>& bins) {
    ordered_json rows = ordered_json::array();
    for (const EquidistBin& bin : bins) {
        rows.push_back(ordered_json{{"lo", bin.lo},
                                    {"hi", bin.hi},
                                    {"count", bin.count},
                                    {"expected", bin.expected},
                                    {"z", bin.z}});
    }
    return rows;
}

}  // namespace

std::string render_equidist_json(const EquidistReport& report) {
    ordered_json doc;
    doc["version"] = report.version;
    doc["config_hash"] = report.config_hash;
    doc["driver"] = report.driver;
    doc["n"] = report.n;
    doc["results"] = ordered_json::array(
        {ordered_json{{"family", "uniform"},
                      {"max_abs_z", report.max_abs_z_uniform},
                      {"bins", equidist_bins_json(report.uniform_bins)}},
         ordered_json{{"family", "gaussian"},
                      {"max_abs_z", report.max_abs_z_gaussian},
                      {"bins", equidist_bins_json(report.gaussian_bins)}}});
    return doc.dump(2) + "\n";
}

std::string render_equidist_csv(const EquidistReport& report) {
    std::ostringstream os;
    os << "# version=" << report.version << " config=" << report.config_hash
       << " driver=" << report.driver << " n=" << report.n << "\n";
    os << "family,lo,hi,count,expected,z\n";
    auto rows = [&os](const char* family, const std::vector<EquidistBin>& bins) {
        for (const EquidistBin& bin : bins) {
            os << family << "," << format_double(bin.lo) << "," << format_double(bin.hi)
               << "," << bin.count << "," << format_double(bin.expected) << ","
               << format_double(bin.z) << "\n";
        }
    };
    rows("uniform", report.uniform_bins);
    rows("gaussian", report.gaussian_bins);
    return os.str();
}

}  // namespace ou::io
