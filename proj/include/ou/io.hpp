#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ou/estimators.hpp"
#include "ou/experiments.hpp"

namespace ou::io {

// An ingested observation file: ordered values z_1..z_n plus a label naming
// where they came from. The on-disk form is two-column CSV with header
// "k,z", k contiguous from 1; lines starting with '#' are metadata comments.
struct FixtureSample {
    std::vector<double> values;
    std::string source;
};

FixtureSample load_observations(const std::filesystem::path& path);

std::string render_observations_csv(std::span<const double> values,
                                    const std::string& meta);
std::string render_observations_json(std::span<const double> values,
                                     const std::string& config_hash,
                                     const std::string& driver);

// Trajectories share one grid; rows are path_id,t,x.
std::string render_trajectories_csv(
    const std::vector<std::vector<std::pair<double, double>>>& paths,
    const std::string& meta);
std::string render_trajectories_json(
    const std::vector<std::vector<std::pair<double, double>>>& paths,
    const std::string& config_hash, const std::string& driver);

void write_text_file(const std::filesystem::path& path, const std::string& content);

// Running-statistic tables over a fixture at n = 5, 10, ..., one per
// estimator, each row bit-identical to the point estimator at that n.
struct EstimateTable {
    EstimatorKind estimator = EstimatorKind::x0;
    double true_value = 0.0;
    std::vector<std::pair<std::size_t, double>> rows;
};

std::vector<EstimateTable> reproduce_tables(const FixtureSample& fixture,
                                            const OuParams& params, TimePoint t);

std::string render_tables_human(const std::vector<EstimateTable>& tables);
std::string render_tables_csv(const std::vector<EstimateTable>& tables,
                              const std::string& config_hash);
std::string render_tables_json(const std::vector<EstimateTable>& tables,
                               const std::string& config_hash);

// Point estimate plus running trace for one estimator over one sample.
struct EstimateReport {
    std::string version;
    std::string config_hash;
    std::string estimator;
    std::string source;
    double t = 0.0;
    std::size_t n = 0;
    bool point_valid = false;
    double point_estimate = 0.0;
    double failure_ratio = 0.0;  // offending log ratio when !point_valid
    EstimateTrace trace;
};

EstimateReport make_estimate_report(const ObservationSample& sample,
                                    EstimatorKind kind, const KnownContext& ctx,
                                    const std::string& source,
                                    const std::string& config_hash);

std::string render_estimate_json(const EstimateReport& report);
std::string render_estimate_csv(const EstimateReport& report);

std::string render_consistency_json(const ConsistencyReport& report);
std::string render_consistency_csv(const ConsistencyReport& report);
std::string render_moments_json(const MomentReport& report);
std::string render_moments_csv(const MomentReport& report);
std::string render_covariance_json(const CovarianceReport& report);
std::string render_covariance_csv(const CovarianceReport& report);
std::string render_equidist_json(const EquidistReport& report);
std::string render_equidist_csv(const EquidistReport& report);

}  // namespace ou::io
