#pragma once

// Smooth iteratively reweighted l1 recovery:
//   minimize ||A x - b||^2  subject to  sum_i w_i |x_i| <= r
// by projected gradient descent, with weights w_i = p / (|x_i| + eps)^(1-p)
// recomputed from the current iterate while p decreases from 1 (LASSO).

#include "wl1/ball.hpp"
#include "wl1/types.hpp"

#include <chrono>
#include <optional>
#include <type_traits>
#include <vector>

namespace wl1 {

template <typename Scalar>
struct RecoveryProblem {
    Matrix<Scalar> A;
    Vector<Scalar> b;
    Scalar radius{1};
    Scalar epsilon{Scalar(0.01)};
    std::vector<Scalar> p_schedule{Scalar(1)};
    int max_inner_iterations = 5000;
    // displacement below which a solve stops; the off-support tail ends up about
    // 10x this value, so it sits two decades under kSupportThreshold
    Scalar tolerance{Scalar(1e-8)};
    // cap on weight updates per p value
    int max_weight_rounds = 30;
    AlgorithmChoice algo = AlgorithmChoice::bucket_filter;
    // planted signal, used only for the reported reconstruction error
    std::optional<Vector<Scalar>> x_true;
};

template <typename Scalar>
struct RecoveryReport {
    Vector<Scalar> x_hat;
    Index l0 = 0;
    Scalar l1{0};
    Scalar rec{0};
    long iters = 0;
    double wall_ms = 0;
    bool converged = true;
};

inline constexpr double kSupportThreshold = 1e-6;

/// `count` values evenly spaced from 1 down to `p_min` inclusive.
template <typename Scalar = double>
std::vector<Scalar> smooth_p_schedule(int count, Scalar p_min = Scalar(0.1)) {
    if (count < 1)
        throw Error(Errc::InvalidP, "schedule length must be >= 1");
    if (!(p_min > 0 && p_min <= 1))
        throw Error(Errc::InvalidP, "p_min must lie in (0, 1]");
    std::vector<Scalar> schedule(static_cast<std::size_t>(count));
    if (count == 1) {
        schedule[0] = 1;
        return schedule;
    }
    for (int k = 0; k < count; ++k)
        schedule[static_cast<std::size_t>(k)] =
            Scalar(1) - (Scalar(1) - p_min) * Scalar(k) / Scalar(count - 1);
    return schedule;
}

template <typename Derived>
Vector<typename Derived::Scalar> irl1_weights(const Eigen::MatrixBase<Derived> &x,
                                              typename Derived::Scalar p,
                                              typename Derived::Scalar epsilon) {
    using Scalar = typename Derived::Scalar;
    if (!(p > 0 && p <= 1))
        throw Error(Errc::InvalidP, "p must lie in (0, 1]");
    if (!(epsilon > 0))
        throw Error(Errc::InvalidEpsilon, "epsilon must be positive");
    return (p / (x.array().abs() + epsilon).pow(Scalar(1) - p)).matrix();
}

template <typename Scalar>
void validate(const RecoveryProblem<Scalar> &problem) {
    if (problem.A.rows() < 1 || problem.A.cols() < 1)
        throw Error(Errc::DimensionMismatch, "A must be nonempty");
    if (problem.b.size() != problem.A.rows())
        throw Error(Errc::DimensionMismatch, "b must have A.rows() entries");
    if (problem.x_true && problem.x_true->size() != problem.A.cols())
        throw Error(Errc::DimensionMismatch, "x_true must have A.cols() entries");
    if (!(problem.radius > 0))
        throw Error(Errc::InvalidRadius, "radius must be positive");
    if (!(problem.epsilon > 0))
        throw Error(Errc::InvalidEpsilon, "epsilon must be positive");
    const auto &ps = problem.p_schedule;
    if (ps.empty() || ps.front() != Scalar(1))
        throw Error(Errc::InvalidP, "p schedule must start at 1");
    for (std::size_t k = 0; k < ps.size(); ++k) {
        if (!(ps[k] > 0 && ps[k] <= 1))
            throw Error(Errc::InvalidP, "p values must lie in (0, 1]");
        if (k > 0 && !(ps[k] < ps[k - 1]))
            throw Error(Errc::InvalidP, "p schedule must be strictly decreasing");
    }
}

/// ||A||_2^2 by power iteration on A^T A from the all-ones vector.
template <typename Scalar>
Scalar lipschitz_constant(const Matrix<Scalar> &A, int iterations = 50) {
    Vector<Scalar> v = Vector<Scalar>::Ones(A.cols()).normalized();
    Scalar estimate = 0;
    for (int it = 0; it < iterations; ++it) {
        Vector<Scalar> u = A.transpose() * (A * v);
        estimate = u.norm();
        if (estimate == 0)
            return 0;
        v = u / estimate;
    }
    return estimate;
}

/// Gradient of 0.5 * ||A x - b||^2.
template <typename Scalar>
Vector<Scalar> least_squares_gradient(const Matrix<Scalar> &A, const Vector<Scalar> &b,
                                      const Vector<Scalar> &x) {
    return A.transpose() * (A * x - b);
}

template <typename Scalar>
struct InnerSolve {
    Vector<Scalar> x;
    long iters = 0;
    bool converged = false;
};

/// Projected gradient descent on the weighted ball {sum w_i |x_i| <= r}.
template <typename Scalar>
InnerSolve<Scalar> solve_inner(const RecoveryProblem<Scalar> &problem,
                               const std::type_identity_t<Vector<Scalar>> &x0,
                               const std::type_identity_t<Vector<Scalar>> &w, std::type_identity_t<Scalar> step) {
    if (x0.size() != problem.A.cols() || w.size() != problem.A.cols())
        throw Error(Errc::DimensionMismatch, "x0 and w must have A.cols() entries");
    if (problem.b.size() != problem.A.rows())
        throw Error(Errc::DimensionMismatch, "b must have A.rows() entries");
    if (!(step > 0))
        throw Error(Errc::InvalidSize, "step size must be positive");

    ProblemInstance<Scalar> ball{Vector<Scalar>(), w, problem.radius};
    InnerSolve<Scalar> out;
    ball.y = x0;
    out.x = project_weighted_l1_ball(ball, problem.algo);
    for (int it = 0; it < problem.max_inner_iterations; ++it) {
        ball.y = out.x - step * least_squares_gradient(problem.A, problem.b, out.x);
        Vector<Scalar> next = project_weighted_l1_ball(ball, problem.algo);
        const Scalar moved = (next - out.x).norm();
        out.x = std::move(next);
        ++out.iters;
        if (moved < problem.tolerance) {
            out.converged = true;
            break;
        }
    }
    return out;
}

template <typename Scalar>
InnerSolve<Scalar> solve_inner(const RecoveryProblem<Scalar> &problem,
                               const std::type_identity_t<Vector<Scalar>> &x0,
                               const std::type_identity_t<Vector<Scalar>> &w) {
    const Scalar lipschitz = lipschitz_constant(problem.A) * Scalar(1 + 1e-6);
    return solve_inner(problem, x0, w, lipschitz > 0 ? Scalar(1) / lipschitz : Scalar(1));
}

template <typename Scalar>
Scalar reconstruction_error(const RecoveryProblem<Scalar> &problem, const Vector<Scalar> &x) {
    if (problem.x_true) {
        const Scalar ref = problem.x_true->norm();
        const Scalar err = (x - *problem.x_true).norm();
        return ref > 0 ? err / ref : err;
    }
    return (problem.A * x - problem.b).norm();
}

template <typename Scalar>
RecoveryReport<Scalar> sirl1(const RecoveryProblem<Scalar> &problem,
                             const std::type_identity_t<Vector<Scalar>> &x0) {
    validate(problem);
    if (x0.size() != problem.A.cols())
        throw Error(Errc::DimensionMismatch, "x0 must have A.cols() entries");

    const auto start = std::chrono::steady_clock::now();
    const Scalar lipschitz = lipschitz_constant(problem.A) * Scalar(1 + 1e-6);
    const Scalar step = lipschitz > 0 ? Scalar(1) / lipschitz : Scalar(1);

    RecoveryReport<Scalar> report;
    Vector<Scalar> x = x0;
    for (Scalar p : problem.p_schedule) {
        // with p == 1 every weight is 1 regardless of x, so one solve suffices
        const int rounds = p == Scalar(1) ? 1 : problem.max_weight_rounds;
        bool settled = rounds == 1;
        for (int round = 0; round < rounds; ++round) {
            const Vector<Scalar> w = irl1_weights(x, p, problem.epsilon);
            auto inner = solve_inner(problem, x, w, step);
            report.iters += inner.iters;
            report.converged = report.converged && inner.converged;
            const Scalar moved = (inner.x - x).norm();
            x = std::move(inner.x);
            if (moved < problem.tolerance) {
                settled = true;
                break;
            }
        }
        report.converged = report.converged && settled;
    }

    report.x_hat = x;
    report.l0 = (x.array().abs() > Scalar(kSupportThreshold)).count();
    report.l1 = x.template lpNorm<1>();
    report.rec = reconstruction_error(problem, x);
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace wl1
