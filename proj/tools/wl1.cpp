// wl1: weighted l1-ball projection and experiment driver.
//
// Exit codes: 0 success, 2 bad arguments, 3 I/O error, 4 internal invariant violation.

#include "wl1/ball.hpp"
#include "wl1/bench/harness.hpp"
#include "wl1/bench/vector_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

namespace {

constexpr int kExitBadArgs = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvariant = 4;

int exit_code_for(const wl1::Error &e) {
    switch (e.code()) {
    case wl1::Errc::Io:
    case wl1::Errc::Malformed: return kExitIo;
    case wl1::Errc::Invariant: return kExitInvariant;
    default: return kExitBadArgs;
    }
}

wl1::AlgorithmChoice algorithm_or_throw(const std::string &name) {
    if (auto algo = wl1::parse_algorithm(name))
        return *algo;
    throw wl1::Error(wl1::Errc::InvalidSize, "unknown algorithm '" + name + "'");
}

wl1::bench::Distribution distribution_or_throw(const std::string &name) {
    if (auto dist = wl1::bench::parse_distribution(name))
        return *dist;
    throw wl1::Error(wl1::Errc::InvalidSize, "unknown distribution '" + name + "'");
}

wl1::bench::WeightSpec weight_spec(const std::string &value) {
    if (value == "unit")
        return {wl1::bench::WeightMode::unit, {}};
    if (value == "uniform")
        return {wl1::bench::WeightMode::uniform, {}};
    return {wl1::bench::WeightMode::file, value};
}

/// Opens --csv FILE, or stdout when empty.
struct CsvSink {
    std::ofstream file;
    std::ostream *stream = &std::cout;

    explicit CsvSink(const std::string &path) {
        if (path.empty())
            return;
        file.open(path, std::ios::binary | std::ios::trunc);
        if (!file)
            throw wl1::Error(wl1::Errc::Io, "cannot open " + path);
        stream = &file;
    }
    void close() {
        if (file.is_open()) {
            file.close();
            if (!file)
                throw wl1::Error(wl1::Errc::Io, "write failed");
        }
    }
};

struct ProjectArgs {
    std::string input;
    wl1::Index random_d = 0;
    std::string dist = "uniform";
    double std_dev = 1e-1;
    double radius = 1.0;
    std::string weights = "unit";
    std::string algo = "bucket-filter";
    std::uint64_t seed = 0;
    std::string out;
    std::string path;
};

int run_project(const ProjectArgs &args) {
    using namespace wl1::bench;
    wl1::ProblemInstance<double> inst;
    ProjectionPath path = ProjectionPath::ball;
    if (!args.input.empty()) {
        inst.y = read_vector_file(args.input);
        if (inst.y.size() == 0)
            throw wl1::Error(wl1::Errc::EmptyInput, "input vector is empty");
        inst.a = args.radius;
        const WeightSpec weights = weight_spec(args.weights);
        if (weights.mode == WeightMode::unit) {
            inst.w = wl1::Vector<double>::Ones(inst.y.size());
        } else if (weights.mode == WeightMode::file) {
            inst.w = read_vector_file(weights.file);
        } else {
            inst.w = gen_instance(inst.y.size(), Distribution::uniform, 0.0, weights, args.radius,
                                  args.seed)
                         .w;
        }
    } else {
        if (args.random_d < 1)
            throw wl1::Error(wl1::Errc::InvalidSize, "give --input FILE or --random-d N");
        const Distribution dist = distribution_or_throw(args.dist);
        inst = gen_instance(args.random_d, dist, args.std_dev, weight_spec(args.weights), args.radius,
                            args.seed);
        path = default_path(dist);
    }
    if (args.path == "simplex")
        path = ProjectionPath::simplex;
    else if (args.path == "ball")
        path = ProjectionPath::ball;
    else if (!args.path.empty())
        throw wl1::Error(wl1::Errc::InvalidSize, "unknown path '" + args.path + "'");

    const wl1::AlgorithmChoice algo = algorithm_or_throw(args.algo);
    wl1::Vector<double> x;
    std::optional<wl1::ThresholdResult<double>> threshold;
    if (path == ProjectionPath::simplex) {
        auto proj = wl1::project_simplex_detailed(inst, algo);
        x = std::move(proj.x);
        threshold = proj.result;
    } else {
        auto proj = wl1::project_weighted_l1_ball_detailed(inst, algo);
        x = std::move(proj.x);
        threshold = proj.threshold;
    }

    const double norm = wl1::weighted_l1_norm(x, inst.w);
    const bool feasible = path == ProjectionPath::simplex
                              ? std::abs(norm - inst.a) <= wl1::kRelTol * inst.a &&
                                    (x.array() >= 0).all()
                              : norm <= inst.a * (1 + wl1::kRelTol);

    std::cout << "path=" << (path == ProjectionPath::simplex ? "simplex" : "ball") << " algo="
              << wl1::to_string(algo) << " d=" << inst.size() << " a=" << inst.a;
    if (threshold)
        std::cout << " lambda=" << threshold->lambda << " support=" << threshold->support_size
                  << " ops_visited=" << threshold->ops_visited;
    else
        std::cout << " inside=1";
    std::cout << " weighted_norm=" << norm << '\n';

    if (!args.out.empty())
        write_vector_file(args.out, x);
    if (!feasible) {
        std::cerr << "error: projection violates the constraint\n";
        return kExitInvariant;
    }
    return 0;
}

struct BenchArgs {
    std::vector<wl1::Index> sizes{100000};
    std::vector<double> radii{4.0};
    std::vector<std::string> dists{"uniform"};
    double std_dev = 1e-1;
    std::vector<std::string> algos{"sort", "pivot", "bucket", "bucket-filter"};
    int trials = 50;
    std::uint64_t seed = 0;
    std::string weights = "unit";
    std::string csv;
};

int run_bench(const BenchArgs &args) {
    using namespace wl1::bench;
    SweepConfig config;
    config.sizes = args.sizes;
    config.radii = args.radii;
    for (const auto &d : args.dists)
        config.dists.push_back(distribution_or_throw(d));
    config.algos.clear();
    for (const auto &a : args.algos)
        config.algos.push_back(algorithm_or_throw(a));
    config.std_dev = args.std_dev;
    config.trials = args.trials;
    config.seed = args.seed;
    config.weights = weight_spec(args.weights);

    CsvSink sink(args.csv);
    const auto records = run_timing_sweep(config, sink.stream);
    sink.stream->flush();
    sink.close();

    const double worst = max_lambda_err(records);
    if (!(worst <= wl1::kRelTol)) {
        std::cerr << "error: backends disagree with the sort oracle (max lambda_err " << worst << ")\n";
        return kExitInvariant;
    }
    return 0;
}

struct RecoverArgs {
    wl1::Index n = 100;
    wl1::Index m = 256;
    std::vector<wl1::Index> k{5};
    std::vector<double> radius;
    std::vector<int> num_p{3};
    double eps = 0.01;
    std::uint64_t seed = 0;
    int seeds = 1;
    int max_iter = 5000;
    double tol = 1e-8;
    std::string algo = "bucket-filter";
    std::string csv;
};

int run_recover(const RecoverArgs &args) {
    using namespace wl1::bench;
    RecoveryConfig config;
    config.n = args.n;
    config.m = args.m;
    config.k_list = args.k;
    config.radius_list = args.radius;
    config.num_p_list = args.num_p;
    config.epsilon = args.eps;
    config.seed = args.seed;
    config.seeds = args.seeds;
    config.max_iter = args.max_iter;
    config.tolerance = args.tol;
    config.algo = algorithm_or_throw(args.algo);

    CsvSink sink(args.csv);
    run_recovery_table(config, sink.stream);
    sink.stream->flush();
    sink.close();
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Weighted l1-ball projection and experiment driver"};
    app.require_subcommand(1);

    ProjectArgs project;
    auto *cmd_project = app.add_subcommand("project", "Project one vector");
    auto *opt_input = cmd_project->add_option("--input", project.input, "Input vector file");
    auto *opt_random = cmd_project->add_option("--random-d", project.random_d, "Generate a random vector of size N");
    opt_input->excludes(opt_random);
    cmd_project->add_option("--dist", project.dist, "uniform|gaussian")->capture_default_str();
    cmd_project->add_option("--std", project.std_dev, "Gaussian standard deviation")->capture_default_str();
    cmd_project->add_option("--radius", project.radius, "Ball radius / simplex level")->capture_default_str();
    cmd_project->add_option("--weights", project.weights, "unit|uniform|FILE")->capture_default_str();
    cmd_project->add_option("--algo", project.algo, "sort|pivot|bucket|bucket-filter")->capture_default_str();
    cmd_project->add_option("--seed", project.seed, "RNG seed")->capture_default_str();
    cmd_project->add_option("--out", project.out, "Write the projection to this vector file");
    cmd_project->add_option("--path", project.path, "ball|simplex (default: simplex for uniform, ball otherwise)");

    BenchArgs bench;
    auto *cmd_bench = app.add_subcommand("bench", "Timing sweep over sizes and radii");
    cmd_bench->add_option("--sizes", bench.sizes, "Vector sizes")->delimiter(',')->capture_default_str();
    cmd_bench->add_option("--radii", bench.radii, "Radii")->delimiter(',')->capture_default_str();
    cmd_bench->add_option("--dists", bench.dists, "uniform,gaussian")->delimiter(',')->capture_default_str();
    cmd_bench->add_option("--std", bench.std_dev, "Gaussian standard deviation")->capture_default_str();
    cmd_bench->add_option("--algos", bench.algos, "Algorithms")->delimiter(',')->capture_default_str();
    cmd_bench->add_option("--trials", bench.trials, "Trials per cell")->capture_default_str();
    cmd_bench->add_option("--seed", bench.seed, "RNG seed")->capture_default_str();
    cmd_bench->add_option("--weights", bench.weights, "unit|uniform|FILE")->capture_default_str();
    cmd_bench->add_option("--csv", bench.csv, "Output CSV (default stdout)");

    RecoverArgs recover;
    auto *cmd_recover = app.add_subcommand("recover", "Sparse recovery table");
    cmd_recover->add_option("--n", recover.n, "Rows of A")->capture_default_str();
    cmd_recover->add_option("--m", recover.m, "Columns of A")->capture_default_str();
    cmd_recover->add_option("--k", recover.k, "Sparsity levels")->delimiter(',')->capture_default_str();
    cmd_recover->add_option("--radius", recover.radius, "Radii (default: k)")->delimiter(',');
    cmd_recover->add_option("--num-p", recover.num_p, "Schedule lengths")->delimiter(',')->capture_default_str();
    cmd_recover->add_option("--eps", recover.eps, "Reweighting epsilon")->capture_default_str();
    cmd_recover->add_option("--seed", recover.seed, "First seed")->capture_default_str();
    cmd_recover->add_option("--seeds", recover.seeds, "Number of seeds")->capture_default_str();
    cmd_recover->add_option("--max-iter", recover.max_iter, "Inner iteration cap")->capture_default_str();
    cmd_recover->add_option("--tol", recover.tol, "Displacement tolerance")->capture_default_str();
    cmd_recover->add_option("--algo", recover.algo, "Projection backend")->capture_default_str();
    cmd_recover->add_option("--csv", recover.csv, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitBadArgs;
    }

    try {
        if (*cmd_project)
            return run_project(project);
        if (*cmd_bench)
            return run_bench(bench);
        if (*cmd_recover)
            return run_recover(recover);
    } catch (const wl1::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvariant;
    }
    return kExitBadArgs;
}
