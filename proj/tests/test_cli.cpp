#include "wl1/bench/harness.hpp"
#include "wl1/bench/vector_io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wl1;

namespace {

const std::filesystem::path kDir = std::filesystem::temp_directory_path() / "wl1_test_cli";

/// Runs the CLI with `args`, stdout into `out.txt`; returns the exit status.
int run(const std::string &args) {
    std::filesystem::create_directories(kDir);
    const std::string cmd = std::string("\"") + WL1_CLI_PATH + "\" " + args + " > \"" +
                            (kDir / "out.txt").string() + "\" 2> \"" + (kDir / "err.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string path(const std::string &name) { return "\"" + (kDir / name).string() + "\""; }

} // namespace

TEST_CASE("project round trip") {
    Vector<double> y(4);
    y << -3, 1, 0.5, 2;
    std::filesystem::create_directories(kDir);
    bench::write_vector_file((kDir / "y.bin").string(), y);

    REQUIRE(run("project --input " + path("y.bin") + " --radius 2 --algo pivot --out " + path("x.bin")) == 0);
    const auto x = bench::read_vector_file((kDir / "x.bin").string());
    const auto expected = project_weighted_l1_ball(ProblemInstance<double>{y, Vector<double>::Ones(4), 2.0},
                                                   AlgorithmChoice::sort);
    CHECK((x - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(slurp(kDir / "out.txt").find("path=ball") != std::string::npos);

    Vector<double> w(4);
    w << 1, 2, 0.5, 1;
    bench::write_vector_file((kDir / "w.bin").string(), w);
    CHECK(run("project --input " + path("y.bin") + " --weights " + path("w.bin") +
              " --radius 1 --path simplex --out " + path("x.bin")) == 0);
    const auto xs = bench::read_vector_file((kDir / "x.bin").string());
    CHECK(weighted_l1_norm(xs, w) == doctest::Approx(1.0));

    CHECK(run("project --random-d 1000 --dist gaussian --std 0.01 --radius 1 --seed 3") == 0);
    CHECK(slurp(kDir / "out.txt").find("lambda=") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(run("") == 2);
    CHECK(run("project --random-d 10 --algo quick") == 2);
    CHECK(run("project --random-d 10 --radius -1") == 2);
    CHECK(run("project --input " + path("y.bin") + " --random-d 10") == 2);
    CHECK(run("project --input " + path("does_not_exist.bin")) == 3);
    {
        std::ofstream bad(kDir / "bad.bin", std::ios::binary);
        bad << "garbage";
    }
    CHECK(run("project --input " + path("bad.bin")) == 3);
    CHECK(run("bench --sizes 100 --trials 1 --csv " + path("no_such_dir/x.csv")) == 3);
}

TEST_CASE("bench and recover csv") {
    REQUIRE(run("bench --sizes 300,600 --radii 1,4 --dists uniform,gaussian --trials 2 --csv " + path("b.csv")) ==
            0);
    std::istringstream in(slurp(kDir / "b.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == bench::kBenchHeader);
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        ++rows;
    CHECK(rows == 2 * 2 * 2 * 4 * 3);

    REQUIRE(run("recover --n 20 --m 40 --k 2 --num-p 1,2 --seeds 2") == 0);
    std::istringstream rin(slurp(kDir / "out.txt"));
    std::getline(rin, header);
    CHECK(header == bench::kRecoverHeader);
    rows = 0;
    for (std::string line; std::getline(rin, line);)
        ++rows;
    CHECK(rows == 2 * 3);
}
