#pragma once

// Seeded instance generation, timing sweeps and recovery tables with CSV output.

#include "wl1/ball.hpp"
#include "wl1/sirl1.hpp"
#include "wl1/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wl1::bench {

enum class Distribution { uniform, gaussian };
enum class WeightMode { unit, uniform, file };
enum class ProjectionPath { simplex, ball };

std::string_view to_string(Distribution dist);
std::optional<Distribution> parse_distribution(std::string_view name);

/// Gaussian inputs go through the ball path (signed), uniform ones through the simplex path.
ProjectionPath default_path(Distribution dist);

struct WeightSpec {
    WeightMode mode = WeightMode::unit;
    std::string file; // for WeightMode::file
};

/// Deterministic instance: y uniform on [0,1) or N(0, std_dev^2); weights unit,
/// uniform on (0,1], or read from a vector file.
ProblemInstance<double> gen_instance(Index d, Distribution dist, double std_dev,
                                     const WeightSpec &weights, double radius, std::uint64_t seed);

struct BenchRecord {
    std::string algo;
    std::string dist;
    Index d = 0;
    double a = 0;
    double std_dev = 0;
    std::uint64_t seed = 0;
    std::optional<int> trial; // empty for the per-algorithm mean row
    double time_ns = 0;
    double lambda = 0;
    double support = 0;
    double ops_visited = 0;
    double lambda_err = 0;
    bool failed = false;
};

struct SweepConfig {
    std::vector<Index> sizes;
    std::vector<double> radii;
    std::vector<Distribution> dists;
    double std_dev = 1e-1;
    std::vector<AlgorithmChoice> algos{kAllAlgorithms.begin(), kAllAlgorithms.end()};
    int trials = 50;
    std::uint64_t seed = 0;
    WeightSpec weights;
    std::optional<ProjectionPath> path; // default per distribution
};

inline constexpr const char *kBenchHeader =
    "algo,dist,d,a,std_dev,seed,trial,time_ns,lambda,support,ops_visited,lambda_err";
inline constexpr const char *kRecoverHeader =
    "algo,n,m,k,radius,num_p,seed,l0,l1,rec,iters,time_ms,converged";

void write_csv_header_bench(std::ostream &out);
void write_csv_row(std::ostream &out, const BenchRecord &rec);

/// Runs every (dist, d, a) cell: per trial one fresh instance shared by all
/// algorithms, one untimed warm-up per algorithm and cell, then one timed run
/// per algorithm and trial. Rows are streamed to `out` (when given) and returned.
std::vector<BenchRecord> run_timing_sweep(const SweepConfig &config, std::ostream *out);

/// Largest lambda_err over non-mean rows.
double max_lambda_err(const std::vector<BenchRecord> &records);

struct RecoveryRecord {
    std::string algo;
    Index n = 0;
    Index m = 0;
    Index k = 0;
    double radius = 0;
    int num_p = 1;
    std::optional<std::uint64_t> seed; // empty for the mean row
    double l0 = 0;
    double l1 = 0;
    double rec = 0;
    double iters = 0;
    double time_ms = 0;
    bool converged = true;
};

struct RecoveryConfig {
    Index n = 100;
    Index m = 256;
    std::vector<Index> k_list{5};
    std::vector<double> radius_list; // empty: radius = k
    std::vector<int> num_p_list{3};
    int seeds = 1;
    std::uint64_t seed = 0;
    double epsilon = 0.01;
    int max_iter = 5000;
    double tolerance = 1e-8;
    AlgorithmChoice algo = AlgorithmChoice::bucket_filter;
};

struct PlantedProblem {
    RecoveryProblem<double> problem;
    Vector<double> x0;
};

/// k-sparse +-1 signal, A with N(0,1)/sqrt(n) entries, b = A x_true, x0 ~ N(0, I).
PlantedProblem make_planted_problem(Index n, Index m, Index k, std::uint64_t seed);

void write_csv_header_recover(std::ostream &out);
void write_csv_row(std::ostream &out, const RecoveryRecord &rec);

/// One row per (k, radius, #p, seed) plus a mean row per configuration. The
/// planted problem depends only on (seed, k, seed index), so radius and #p
/// comparisons are paired.
std::vector<RecoveryRecord> run_recovery_table(const RecoveryConfig &config, std::ostream *out);

} // namespace wl1::bench
