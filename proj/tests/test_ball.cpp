#include "oracle.hpp"
#include "test_util.hpp"

#include "wl1/ball.hpp"

#include <doctest.h>

using namespace wl1;
using wl1::test::Draw;

namespace {

Vector<double> vec(std::initializer_list<double> values) {
    Vector<double> v(static_cast<Index>(values.size()));
    Index i = 0;
    for (double x : values)
        v[i++] = x;
    return v;
}

ProblemInstance<double> random_ball_instance(bench::Rng &rng, Index d, bool unit) {
    auto inst = wl1::test::random_instance(rng, d, Draw::gaussian, unit, 1.0);
    // radius relative to the current norm, so both inside and outside points occur
    inst.a = weighted_l1_norm(inst.y, inst.w) * std::exp(3 * (rng.uniform01() - 0.8));
    return inst;
}

} // namespace

TEST_CASE("ball examples") {
    for (AlgorithmChoice algo : kAllAlgorithms) {
        CAPTURE(to_string(algo));
        SUBCASE("inside point is returned unchanged") {
            const ProblemInstance<double> inst{vec({0.2, -0.3}), vec({1, 1}), 1.0};
            const auto p = project_weighted_l1_ball_detailed(inst, algo);
            CHECK(p.x == inst.y);
            CHECK_FALSE(p.threshold.has_value());
        }
        SUBCASE("sign is restored after the simplex step") {
            const ProblemInstance<double> inst{vec({-3, 1}), vec({1, 1}), 2.0};
            const auto p = project_weighted_l1_ball_detailed(inst, algo);
            CHECK(p.x == vec({-2, 0}));
            REQUIRE(p.threshold.has_value());
            CHECK(p.threshold->lambda == 1.0);
        }
        SUBCASE("zero radius") {
            const ProblemInstance<double> inst{vec({1, -2, 3}), vec({1, 0, 2}), 0.0};
            CHECK(project_weighted_l1_ball(inst, algo) == vec({0, -2, 0}));
        }
        SUBCASE("zero weights pass through") {
            const ProblemInstance<double> inst{vec({-3, 7, 1}), vec({1, 0, 1}), 2.0};
            const auto x = project_weighted_l1_ball(inst, algo);
            CHECK(x == vec({-2, 7, 0}));
            const auto s = project_simplex(ProblemInstance<double>{vec({3, -7, 1}), vec({1, 0, 1}), 2.0}, algo);
            CHECK(s == vec({2, 0, 0}));
        }
    }
}

TEST_CASE("ball and simplex errors") {
    try {
        project_weighted_l1_ball(ProblemInstance<double>{vec({1, 2}), vec({1}), 1.0});
        FAIL("expected LengthMismatch");
    } catch (const Error &e) {
        CHECK(e.code() == Errc::LengthMismatch);
    }
    try {
        project_weighted_l1_ball(ProblemInstance<double>{vec({1}), vec({1}), -1.0});
        FAIL("expected NegativeRadius");
    } catch (const Error &e) {
        CHECK(e.code() == Errc::NegativeRadius);
    }
    try {
        project_weighted_l1_ball(ProblemInstance<double>{vec({5, 1}), vec({1, -1}), 1.0});
        FAIL("expected NonPositiveWeight");
    } catch (const Error &e) {
        CHECK(e.code() == Errc::NonPositiveWeight);
    }
    CHECK_THROWS_AS(project_simplex(ProblemInstance<double>{vec({1}), vec({1}), 0.0}), Error);
    CHECK_THROWS_AS(project_simplex(ProblemInstance<double>{vec({1}), vec({0}), 1.0}), Error);
    CHECK_THROWS_AS(project_simplex(ProblemInstance<double>{Vector<double>(), Vector<double>(), 1.0}), Error);
    CHECK(parse_algorithm("bucket-filter") == AlgorithmChoice::bucket_filter);
    CHECK_FALSE(parse_algorithm("quick").has_value());
}

TEST_CASE("ball projection is feasible, optimal and idempotent") {
    bench::Rng rng(40);
    for (int t = 0; t < 400; ++t) {
        const Index d = 1 + static_cast<Index>(rng.below(2000));
        const auto inst = random_ball_instance(rng, d, t % 2 == 0);
        const Vector<double> x = project_weighted_l1_ball(inst);
        const double norm = weighted_l1_norm(x, inst.w);
        CHECK(norm <= inst.a * (1 + 1e-9));
        if (weighted_l1_norm(inst.y, inst.w) > inst.a)
            CHECK(std::abs(norm - inst.a) <= 1e-9 * inst.a);
        // sign consistency and shrinkage
        CHECK(((x.array() * inst.y.array()) >= 0).all());
        CHECK((x.cwiseAbs().array() <= inst.y.cwiseAbs().array()).all());

        // variational inequality <y - x, u - x> <= 0 for feasible u
        for (int s = 0; s < 20; ++s) {
            Vector<double> u(d);
            for (Index i = 0; i < d; ++i)
                u[i] = rng.normal();
            const double un = weighted_l1_norm(u, inst.w);
            u *= inst.a * rng.uniform01() / un;
            CHECK((inst.y - x).dot(u - x) <= 1e-9 * (1 + inst.y.norm() * (u - x).norm()));
        }
        const Vector<double> again = project_weighted_l1_ball(ProblemInstance<double>{x, inst.w, inst.a});
        CHECK((again - x).cwiseAbs().maxCoeff() <= 1e-9 * (1 + x.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("ball projection is non-expansive") {
    bench::Rng rng(41);
    for (int t = 0; t < 300; ++t) {
        const Index d = 1 + static_cast<Index>(rng.below(500));
        const auto inst = random_ball_instance(rng, d, t % 2 == 0);
        ProblemInstance<double> other = inst;
        for (Index i = 0; i < d; ++i)
            other.y[i] += rng.normal() * 0.3;
        const Vector<double> px = project_weighted_l1_ball(inst);
        const Vector<double> py = project_weighted_l1_ball(other);
        CHECK((px - py).norm() <= (inst.y - other.y).norm() * (1 + 1e-12) + 1e-12);
    }
}

TEST_CASE("all backends agree on the ball") {
    bench::Rng rng(42);
    for (int t = 0; t < 300; ++t) {
        const Index d = 1 + static_cast<Index>(std::exp(rng.uniform01() * std::log(2e4)));
        const auto inst = random_ball_instance(rng, d, t % 2 == 0);
        const auto reference = project_weighted_l1_ball_detailed(inst, AlgorithmChoice::sort);
        for (AlgorithmChoice algo : kAllAlgorithms) {
            const auto p = project_weighted_l1_ball_detailed(inst, algo);
            CHECK((p.x - reference.x).cwiseAbs().maxCoeff() <= 1e-9);
            CHECK(p.threshold.has_value() == reference.threshold.has_value());
            if (p.threshold && reference.threshold)
                CHECK(wl1::test::rel_close(p.threshold->lambda, reference.threshold->lambda, 1e-9));
        }
    }
}

TEST_CASE("simplex projection sits on the level set") {
    bench::Rng rng(43);
    for (int t = 0; t < 200; ++t) {
        const Index d = 1 + static_cast<Index>(rng.below(3000));
        const auto inst = wl1::test::random_instance(rng, d, Draw::uniform, t % 2 == 0,
                                                     wl1::test::log_radius(rng, 0.01, 100));
        for (AlgorithmChoice algo : kAllAlgorithms) {
            const Vector<double> x = project_simplex(inst, algo);
            CHECK(std::abs(weighted_l1_norm(x, inst.w) - inst.a) <= 1e-9 * inst.a);
            CHECK((x.array() >= 0).all());
        }
    }
}
