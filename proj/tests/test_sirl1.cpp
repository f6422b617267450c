#include "wl1/bench/harness.hpp"
#include "wl1/bench/rng.hpp"
#include "wl1/sirl1.hpp"

#include <doctest.h>

using namespace wl1;

namespace {

RecoveryProblem<double> small_problem(bench::Rng &rng, Index n, Index m) {
    RecoveryProblem<double> problem;
    problem.A.resize(n, m);
    for (Index j = 0; j < m; ++j)
        for (Index i = 0; i < n; ++i)
            problem.A(i, j) = rng.normal();
    problem.b.resize(n);
    for (Index i = 0; i < n; ++i)
        problem.b[i] = rng.normal();
    problem.radius = 1.0;
    return problem;
}

} // namespace

TEST_CASE("irl1 weights") {
    Vector<double> x(3);
    x << 0.0, -0.5, 2.0;
    CHECK(irl1_weights(x, 1.0, 0.01) == Vector<double>::Ones(3));
    CHECK(irl1_weights(Vector<double>::Zero(1), 0.5, 0.01)[0] == doctest::Approx(5.0));
    const Vector<double> w = irl1_weights(x, 0.3, 0.01);
    CHECK(w[0] > w[1]);
    CHECK(w[1] > w[2]);
    CHECK((w.array() > 0).all());
    try {
        irl1_weights(x, 0.0, 0.01);
        FAIL("expected InvalidP");
    } catch (const Error &e) {
        CHECK(e.code() == Errc::InvalidP);
    }
    CHECK_THROWS_AS(irl1_weights(x, 1.5, 0.01), Error);
    try {
        irl1_weights(x, 0.5, 0.0);
        FAIL("expected InvalidEpsilon");
    } catch (const Error &e) {
        CHECK(e.code() == Errc::InvalidEpsilon);
    }
}

TEST_CASE("p schedule") {
    CHECK(smooth_p_schedule(1) == std::vector<double>{1.0});
    const auto s3 = smooth_p_schedule(3);
    REQUIRE(s3.size() == 3);
    CHECK(s3[0] == 1.0);
    CHECK(s3[1] == doctest::Approx(0.55));
    CHECK(s3[2] == doctest::Approx(0.1));
    CHECK_THROWS_AS(smooth_p_schedule(0), Error);
}

TEST_CASE("gradient matches central differences") {
    bench::Rng rng(50);
    for (int t = 0; t < 20; ++t) {
        auto problem = small_problem(rng, 6, 9);
        Vector<double> x(9);
        for (Index i = 0; i < 9; ++i)
            x[i] = rng.normal();
        const Vector<double> g = least_squares_gradient(problem.A, problem.b, x);
        auto f = [&](const Vector<double> &v) { return 0.5 * (problem.A * v - problem.b).squaredNorm(); };
        const double h = 1e-6;
        for (Index i = 0; i < 9; ++i) {
            Vector<double> xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const double fd = (f(xp) - f(xm)) / (2 * h);
            CHECK(std::abs(fd - g[i]) <= 1e-5 * std::max(1.0, std::abs(g[i])));
        }
    }
}

TEST_CASE("lipschitz constant matches the top singular value") {
    bench::Rng rng(51);
    const auto problem = small_problem(rng, 20, 40);
    Eigen::JacobiSVD<Matrix<double>> svd(problem.A);
    const double sigma = svd.singularValues()[0];
    CHECK(lipschitz_constant(problem.A) == doctest::Approx(sigma * sigma).epsilon(1e-6));
}

TEST_CASE("solve_inner limits") {
    bench::Rng rng(52);
    SUBCASE("consistent point inside the ball is a fixed point") {
        auto problem = small_problem(rng, 10, 20);
        Vector<double> x0 = Vector<double>::Zero(20);
        x0[3] = 0.2;
        x0[7] = -0.3;
        problem.b = problem.A * x0;
        const auto inner = solve_inner(problem, x0, Vector<double>::Ones(20));
        CHECK(inner.converged);
        CHECK((inner.x - x0).norm() <= 1e-12);
    }
    SUBCASE("huge radius gives least squares") {
        auto problem = small_problem(rng, 30, 10);
        problem.radius = 1e6;
        problem.max_inner_iterations = 100000;
        const auto inner = solve_inner(problem, Vector<double>::Zero(10), Vector<double>::Ones(10));
        const Vector<double> ls = problem.A.colPivHouseholderQr().solve(problem.b);
        CHECK(inner.converged);
        CHECK((inner.x - ls).norm() <= 1e-5 * (1 + ls.norm()));
    }
    SUBCASE("dimension errors") {
        auto problem = small_problem(rng, 5, 8);
        try {
            solve_inner(problem, Vector<double>::Zero(7), Vector<double>::Ones(8));
            FAIL("expected DimensionMismatch");
        } catch (const Error &e) {
            CHECK(e.code() == Errc::DimensionMismatch);
        }
    }
}

TEST_CASE("every inner iterate is feasible and the residual never grows") {
    bench::Rng rng(53);
    for (int t = 0; t < 10; ++t) {
        auto problem = small_problem(rng, 30, 60);
        problem.radius = 2.0;
        problem.max_inner_iterations = 1;
        const double step = 1.0 / (lipschitz_constant(problem.A) * (1 + 1e-6));
        Vector<double> w(60);
        for (Index i = 0; i < 60; ++i)
            w[i] = 0.1 + rng.uniform01();
        Vector<double> x = project_weighted_l1_ball(ProblemInstance<double>{Vector<double>::Zero(60), w, 2.0});
        double residual = (problem.A * x - problem.b).norm();
        for (int it = 0; it < 200; ++it) {
            x = solve_inner(problem, x, w, step).x;
            CHECK(weighted_l1_norm(x, w) <= 2.0 * (1 + 1e-9));
            const double next = (problem.A * x - problem.b).norm();
            CHECK(next <= residual + 1e-7);
            residual = next;
        }
    }
}

TEST_CASE("sirl1 on planted problems") {
    SUBCASE("single p is one LASSO solve") {
        auto planted = bench::make_planted_problem(100, 256, 5, 9);
        planted.problem.radius = 5;
        const auto report = sirl1(planted.problem, planted.x0);
        const double step = 1.0 / (lipschitz_constant(planted.problem.A) * (1 + 1e-6));
        const auto inner = solve_inner(planted.problem, planted.x0, Vector<double>::Ones(256), step);
        CHECK(report.x_hat == inner.x);
        CHECK(report.iters == inner.iters);
        CHECK(report.l1 == doctest::Approx(5.0).epsilon(0.05));
        CHECK(report.l0 == 5);
    }
    SUBCASE("k = 5, three p values") {
        auto planted = bench::make_planted_problem(100, 256, 5, 10);
        planted.problem.radius = 5;
        planted.problem.p_schedule = smooth_p_schedule(3);
        const auto report = sirl1(planted.problem, planted.x0);
        CHECK(report.l0 == 5);
        CHECK(report.rec <= 1e-2);
        CHECK(report.converged);
        CHECK(report.x_hat.size() == 256);
    }
    SUBCASE("schedule length 3 and 5 agree on the support size") {
        auto planted = bench::make_planted_problem(100, 256, 5, 11);
        planted.problem.radius = 5;
        planted.problem.p_schedule = smooth_p_schedule(3);
        const auto r3 = sirl1(planted.problem, planted.x0);
        planted.problem.p_schedule = smooth_p_schedule(5);
        const auto r5 = sirl1(planted.problem, planted.x0);
        CHECK(r3.l0 == r5.l0);
    }
    SUBCASE("residual is reported without ground truth") {
        auto planted = bench::make_planted_problem(40, 80, 3, 12);
        planted.problem.radius = 3;
        planted.problem.x_true.reset();
        const auto report = sirl1(planted.problem, planted.x0);
        CHECK(report.rec == doctest::Approx((planted.problem.A * report.x_hat - planted.problem.b).norm()));
    }
}

TEST_CASE("recovery problem validation") {
    auto planted = bench::make_planted_problem(10, 20, 2, 1);
    auto &problem = planted.problem;
    auto expect = [&](Errc code) {
        try {
            sirl1(problem, planted.x0);
            FAIL("expected an error");
        } catch (const Error &e) {
            CHECK(e.code() == code);
        }
        problem = bench::make_planted_problem(10, 20, 2, 1).problem;
    };
    problem.radius = 0;
    expect(Errc::InvalidRadius);
    problem.epsilon = -1;
    expect(Errc::InvalidEpsilon);
    problem.p_schedule = {0.5, 0.2};
    expect(Errc::InvalidP);
    problem.p_schedule = {1.0, 0.5, 0.5};
    expect(Errc::InvalidP);
    problem.b = Vector<double>::Zero(3);
    expect(Errc::DimensionMismatch);
    CHECK_THROWS_AS(sirl1(problem, Vector<double>::Zero(5)), Error);
}
