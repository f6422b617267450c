#include "wl1/bench/harness.hpp"

#include "wl1/bench/rng.hpp"
#include "wl1/bench/vector_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace wl1::bench {

std::string_view to_string(Distribution dist) {
    return dist == Distribution::uniform ? "uniform" : "gaussian";
}

std::optional<Distribution> parse_distribution(std::string_view name) {
    if (name == "uniform")
        return Distribution::uniform;
    if (name == "gaussian")
        return Distribution::gaussian;
    return std::nullopt;
}

ProjectionPath default_path(Distribution dist) {
    return dist == Distribution::gaussian ? ProjectionPath::ball : ProjectionPath::simplex;
}

ProblemInstance<double> gen_instance(Index d, Distribution dist, double std_dev,
                                     const WeightSpec &weights, double radius, std::uint64_t seed) {
    if (d < 1)
        throw Error(Errc::InvalidSize, "instance size must be >= 1");
    if (dist == Distribution::gaussian && !(std_dev > 0))
        throw Error(Errc::InvalidSize, "gaussian standard deviation must be positive");

    ProblemInstance<double> inst;
    inst.a = radius;
    inst.y.resize(d);
    Rng rng(seed);
    if (dist == Distribution::uniform) {
        for (Index i = 0; i < d; ++i)
            inst.y[i] = rng.uniform01();
    } else {
        for (Index i = 0; i < d; ++i)
            inst.y[i] = std_dev * rng.normal();
    }

    switch (weights.mode) {
    case WeightMode::unit:
        inst.w = Vector<double>::Ones(d);
        break;
    case WeightMode::uniform: {
        Rng wrng(mix_seed(seed ^ 0x5745494748545321ull));
        inst.w.resize(d);
        for (Index i = 0; i < d; ++i)
            inst.w[i] = wrng.uniform_open_closed();
        break;
    }
    case WeightMode::file:
        inst.w = read_vector_file(weights.file);
        if (inst.w.size() != d)
            throw Error(Errc::LengthMismatch, "weight file length differs from d");
        break;
    }
    return inst;
}

namespace {

template <typename T>
void put_number(std::ostream &out, T value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    out.write(buf, res.ptr - buf);
}

struct RunOutcome {
    double lambda = 0;
    double support = 0;
    double ops = 0;
};

RunOutcome run_once(const ProblemInstance<double> &inst, AlgorithmChoice algo, ProjectionPath path) {
    if (path == ProjectionPath::simplex) {
        const auto proj = project_simplex_detailed(inst, algo);
        return {proj.result.lambda, static_cast<double>(proj.result.support_size),
                static_cast<double>(proj.result.ops_visited)};
    }
    const auto proj = project_weighted_l1_ball_detailed(inst, algo);
    if (proj.threshold)
        return {proj.threshold->lambda, static_cast<double>(proj.threshold->support_size),
                static_cast<double>(proj.threshold->ops_visited)};
    return {0.0, static_cast<double>((proj.x.array() != 0.0).count()), 0.0};
}

double relative_error(double value, double reference) {
    const double diff = std::abs(value - reference);
    return reference != 0 ? diff / std::abs(reference) : diff;
}

} // namespace

void write_csv_header_bench(std::ostream &out) { out << kBenchHeader << '\n'; }

void write_csv_row(std::ostream &out, const BenchRecord &r) {
    out << r.algo << ',' << r.dist << ',';
    put_number(out, r.d);
    out << ',';
    put_number(out, r.a);
    out << ',';
    put_number(out, r.std_dev);
    out << ',';
    put_number(out, r.seed);
    out << ',';
    if (r.trial)
        put_number(out, *r.trial);
    else
        out << "mean";
    out << ',';
    if (r.failed) {
        out << "0,nan,0,0,error\n";
        return;
    }
    put_number(out, r.time_ns);
    out << ',';
    put_number(out, r.lambda);
    out << ',';
    put_number(out, r.support);
    out << ',';
    put_number(out, r.ops_visited);
    out << ',';
    put_number(out, r.lambda_err);
    out << '\n';
}

namespace {

// glibc serves blocks above its mmap threshold (at most 32 MiB) with fresh
// mappings, so every d >= ~4e6 run would pay page faults on its output vector
// while smaller runs reuse heap memory. Keep large blocks on the heap so all
// sizes are timed in the same steady state.
void keep_large_blocks_on_heap() {
#if defined(__GLIBC__)
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

} // namespace

std::vector<BenchRecord> run_timing_sweep(const SweepConfig &config, std::ostream *out) {
    if (config.trials < 1)
        throw Error(Errc::InvalidSize, "trials must be >= 1");
    keep_large_blocks_on_heap();
    std::vector<BenchRecord> records;
    if (out)
        write_csv_header_bench(*out);

    for (Distribution dist : config.dists) {
        const ProjectionPath path = config.path.value_or(default_path(dist));
        const double std_dev = dist == Distribution::gaussian ? config.std_dev : 0.0;
        for (Index d : config.sizes) {
            for (double a : config.radii) {
                const std::size_t n_algos = config.algos.size();
                std::vector<BenchRecord> cell;
                std::vector<double> time_sum(n_algos, 0), lambda_sum(n_algos, 0),
                    support_sum(n_algos, 0), ops_sum(n_algos, 0), err_max(n_algos, 0);
                std::vector<int> ok_count(n_algos, 0);

                for (int trial = 0; trial < config.trials; ++trial) {
                    const auto inst = gen_instance(
                        d, dist, std_dev, config.weights, a,
                        derive_seed(config.seed, static_cast<std::uint64_t>(dist),
                                    static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(trial)));
                    std::optional<RunOutcome> reference;
                    try {
                        reference = run_once(inst, AlgorithmChoice::sort, path);
                    } catch (const Error &) {
                    }
                    if (trial == 0) {
                        for (AlgorithmChoice algo : config.algos) {
                            try {
                                (void)run_once(inst, algo, path);
                            } catch (const Error &) {
                            }
                        }
                    }

                    for (std::size_t k = 0; k < n_algos; ++k) {
                        BenchRecord rec;
                        rec.algo = std::string(wl1::to_string(config.algos[k]));
                        rec.dist = std::string(to_string(dist));
                        rec.d = d;
                        rec.a = a;
                        rec.std_dev = std_dev;
                        rec.seed = config.seed;
                        rec.trial = trial;
                        try {
                            const auto start = std::chrono::steady_clock::now();
                            const RunOutcome res = run_once(inst, config.algos[k], path);
                            const auto stop = std::chrono::steady_clock::now();
                            rec.time_ns = std::max<double>(
                                1.0, static_cast<double>(
                                         std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
                                             .count()));
                            rec.lambda = res.lambda;
                            rec.support = res.support;
                            rec.ops_visited = res.ops;
                            rec.lambda_err = reference ? relative_error(res.lambda, reference->lambda)
                                                       : std::nan("");
                            time_sum[k] += rec.time_ns;
                            lambda_sum[k] += rec.lambda;
                            support_sum[k] += rec.support;
                            ops_sum[k] += rec.ops_visited;
                            err_max[k] = std::max(err_max[k], rec.lambda_err);
                            ++ok_count[k];
                        } catch (const Error &) {
                            rec.failed = true;
                        }
                        if (out)
                            write_csv_row(*out, rec);
                        records.push_back(rec);
                    }
                }

                for (std::size_t k = 0; k < n_algos; ++k) {
                    BenchRecord mean;
                    mean.algo = std::string(wl1::to_string(config.algos[k]));
                    mean.dist = std::string(to_string(dist));
                    mean.d = d;
                    mean.a = a;
                    mean.std_dev = std_dev;
                    mean.seed = config.seed;
                    if (ok_count[k] == 0) {
                        mean.failed = true;
                    } else {
                        const double n = ok_count[k];
                        mean.time_ns = time_sum[k] / n;
                        mean.lambda = lambda_sum[k] / n;
                        mean.support = support_sum[k] / n;
                        mean.ops_visited = ops_sum[k] / n;
                        mean.lambda_err = err_max[k];
                    }
                    if (out)
                        write_csv_row(*out, mean);
                    records.push_back(mean);
                }
            }
        }
    }
    return records;
}

double max_lambda_err(const std::vector<BenchRecord> &records) {
    double worst = 0;
    for (const auto &r : records) {
        if (!r.trial || r.failed)
            continue;
        if (std::isnan(r.lambda_err))
            return r.lambda_err;
        worst = std::max(worst, r.lambda_err);
    }
    return worst;
}

PlantedProblem make_planted_problem(Index n, Index m, Index k, std::uint64_t seed) {
    if (n < 1 || m < 1 || k < 0 || k > m)
        throw Error(Errc::InvalidSize, "need n >= 1, m >= 1 and 0 <= k <= m");
    Rng rng(seed);
    PlantedProblem planted;
    auto &problem = planted.problem;

    problem.A.resize(n, m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < n; ++i)
            problem.A(i, j) = scale * rng.normal();

    // partial Fisher-Yates for the support positions
    std::vector<Index> positions(static_cast<std::size_t>(m));
    for (Index j = 0; j < m; ++j)
        positions[static_cast<std::size_t>(j)] = j;
    Vector<double> x_true = Vector<double>::Zero(m);
    for (Index s = 0; s < k; ++s) {
        const auto pick = s + static_cast<Index>(rng.below(static_cast<std::uint64_t>(m - s)));
        std::swap(positions[static_cast<std::size_t>(s)], positions[static_cast<std::size_t>(pick)]);
        x_true[positions[static_cast<std::size_t>(s)]] = (rng.next() & 1u) ? 1.0 : -1.0;
    }

    problem.b = problem.A * x_true;
    problem.x_true = std::move(x_true);
    planted.x0.resize(m);
    for (Index j = 0; j < m; ++j)
        planted.x0[j] = rng.normal();
    return planted;
}

void write_csv_header_recover(std::ostream &out) { out << kRecoverHeader << '\n'; }

void write_csv_row(std::ostream &out, const RecoveryRecord &r) {
    out << r.algo << ',';
    put_number(out, r.n);
    out << ',';
    put_number(out, r.m);
    out << ',';
    put_number(out, r.k);
    out << ',';
    put_number(out, r.radius);
    out << ',';
    put_number(out, r.num_p);
    out << ',';
    if (r.seed)
        put_number(out, *r.seed);
    else
        out << "mean";
    out << ',';
    put_number(out, r.l0);
    out << ',';
    put_number(out, r.l1);
    out << ',';
    put_number(out, r.rec);
    out << ',';
    put_number(out, r.iters);
    out << ',';
    put_number(out, r.time_ms);
    out << ',' << (r.converged ? 1 : 0) << '\n';
}

std::vector<RecoveryRecord> run_recovery_table(const RecoveryConfig &config, std::ostream *out) {
    if (config.seeds < 1)
        throw Error(Errc::InvalidSize, "need at least one seed");
    std::vector<RecoveryRecord> records;
    if (out)
        write_csv_header_recover(*out);

    for (Index k : config.k_list) {
        std::vector<double> radii = config.radius_list;
        if (radii.empty())
            radii.push_back(static_cast<double>(k));
        for (double radius : radii) {
            for (int num_p : config.num_p_list) {
                RecoveryRecord mean;
                mean.algo = num_p == 1 ? "lasso" : "sirl1";
                mean.n = config.n;
                mean.m = config.m;
                mean.k = k;
                mean.radius = radius;
                mean.num_p = num_p;

                for (int s = 0; s < config.seeds; ++s) {
                    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(s);
                    auto planted = make_planted_problem(config.n, config.m, k,
                                                        derive_seed(seed, static_cast<std::uint64_t>(k)));
                    auto &problem = planted.problem;
                    problem.radius = radius;
                    problem.epsilon = config.epsilon;
                    problem.p_schedule = smooth_p_schedule<double>(num_p);
                    problem.max_inner_iterations = config.max_iter;
                    problem.tolerance = config.tolerance;
                    problem.algo = config.algo;
                    const auto report = sirl1(problem, planted.x0);

                    RecoveryRecord rec = mean;
                    rec.seed = seed;
                    rec.l0 = static_cast<double>(report.l0);
                    rec.l1 = report.l1;
                    rec.rec = report.rec;
                    rec.iters = static_cast<double>(report.iters);
                    rec.time_ms = report.wall_ms;
                    rec.converged = report.converged;
                    if (out)
                        write_csv_row(*out, rec);
                    records.push_back(rec);

                    mean.l0 += rec.l0;
                    mean.l1 += rec.l1;
                    mean.rec += rec.rec;
                    mean.iters += rec.iters;
                    mean.time_ms += rec.time_ms;
                    mean.converged = mean.converged && rec.converged;
                }
                const double n = config.seeds;
                mean.l0 /= n;
                mean.l1 /= n;
                mean.rec /= n;
                mean.iters /= n;
                mean.time_ms /= n;
                if (out)
                    write_csv_row(*out, mean);
                records.push_back(mean);
            }
        }
    }
    return records;
}

} // namespace wl1::bench
