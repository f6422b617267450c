#pragma once

// Public entry points: weighted simplex and weighted l1-ball projection.

#include "wl1/bucket.hpp"
#include "wl1/core.hpp"
#include "wl1/pivot.hpp"
#include "wl1/types.hpp"

#include <array>
#include <optional>
#include <string_view>

namespace wl1 {

enum class AlgorithmChoice { sort, pivot, bucket, bucket_filter };

inline constexpr std::array<AlgorithmChoice, 4> kAllAlgorithms = {
    AlgorithmChoice::sort, AlgorithmChoice::pivot, AlgorithmChoice::bucket,
    AlgorithmChoice::bucket_filter};

inline std::string_view to_string(AlgorithmChoice algo) {
    switch (algo) {
    case AlgorithmChoice::sort: return "sort";
    case AlgorithmChoice::pivot: return "pivot";
    case AlgorithmChoice::bucket: return "bucket";
    case AlgorithmChoice::bucket_filter: return "bucket-filter";
    }
    return "unknown";
}

inline std::optional<AlgorithmChoice> parse_algorithm(std::string_view name) {
    for (AlgorithmChoice algo : kAllAlgorithms)
        if (to_string(algo) == name)
            return algo;
    return std::nullopt;
}

/// Runs one backend on an instance with strictly positive weights.
template <typename Scalar>
Projection<Scalar> solve_simplex(const ProblemInstance<Scalar> &inst, AlgorithmChoice algo) {
    switch (algo) {
    case AlgorithmChoice::sort: return weighted_simplex_sort(inst);
    case AlgorithmChoice::pivot: return project_pivot(inst);
    case AlgorithmChoice::bucket: return project_bucket(inst, false);
    case AlgorithmChoice::bucket_filter: return project_bucket(inst, true);
    }
    throw Error(Errc::Invariant, "solve_simplex: unknown algorithm");
}

namespace detail {

/// Positions of the strictly positive weights, or empty when all are positive.
template <typename Scalar>
std::vector<Index> positive_weight_positions(const Vector<Scalar> &w, bool &all_positive) {
    std::vector<Index> keep;
    all_positive = true;
    for (Index i = 0; i < w.size(); ++i) {
        if (w[i] < 0)
            throw Error(Errc::NonPositiveWeight, "weight " + std::to_string(i) + " is negative");
        if (w[i] == 0)
            all_positive = false;
    }
    if (all_positive)
        return keep;
    for (Index i = 0; i < w.size(); ++i)
        if (w[i] > 0)
            keep.push_back(i);
    return keep;
}

template <typename Scalar>
ProblemInstance<Scalar> gather(const Vector<Scalar> &y, const Vector<Scalar> &w, Scalar a,
                               const std::vector<Index> &keep) {
    ProblemInstance<Scalar> sub;
    sub.y = y(keep);
    sub.w = w(keep);
    sub.a = a;
    return sub;
}

} // namespace detail

/// Projection onto {x >= 0 : sum w_i x_i = a}. Zero-weight coordinates are
/// unconstrained by the level and come out as max(y_i, 0).
template <typename Scalar>
Projection<Scalar> project_simplex_detailed(const ProblemInstance<Scalar> &inst,
                                            AlgorithmChoice algo = AlgorithmChoice::bucket_filter) {
    if (inst.w.size() != inst.y.size())
        throw Error(Errc::LengthMismatch, "project_simplex: y and w differ in length");
    if (inst.y.size() == 0)
        throw Error(Errc::EmptyInput, "project_simplex: empty input");
    if (!(inst.a > 0) || !std::isfinite(inst.a))
        throw Error(Errc::InvalidRadius, "project_simplex: level must be positive");

    bool all_positive = true;
    const auto keep = detail::positive_weight_positions(inst.w, all_positive);
    if (all_positive)
        return solve_simplex(inst, algo);
    if (keep.empty())
        throw Error(Errc::NonPositiveWeight, "project_simplex: all weights are zero");

    auto sub = solve_simplex(detail::gather(inst.y, inst.w, inst.a, keep), algo);
    Projection<Scalar> out;
    out.x = inst.y.cwiseMax(Scalar(0));
    out.x(keep) = sub.x;
    out.result = sub.result;
    return out;
}

template <typename Scalar>
Vector<Scalar> project_simplex(const ProblemInstance<Scalar> &inst,
                               AlgorithmChoice algo = AlgorithmChoice::bucket_filter) {
    return project_simplex_detailed(inst, algo).x;
}

template <typename Scalar>
struct BallProjection {
    Vector<Scalar> x;
    // empty when y already lies in the ball (or a == 0) and no search ran
    std::optional<ThresholdResult<Scalar>> threshold;
};

/// Projection onto {x : sum w_i |x_i| <= a} by sign decomposition over the
/// weighted simplex projection of |y|. Zero-weight coordinates pass through.
template <typename Scalar>
BallProjection<Scalar> project_weighted_l1_ball_detailed(
    const ProblemInstance<Scalar> &inst, AlgorithmChoice algo = AlgorithmChoice::bucket_filter) {
    if (inst.w.size() != inst.y.size())
        throw Error(Errc::LengthMismatch, "project_weighted_l1_ball: y and w differ in length");
    if (inst.a < 0 || !std::isfinite(inst.a))
        throw Error(Errc::NegativeRadius, "project_weighted_l1_ball: radius must be >= 0");

    bool all_positive = true;
    const auto keep = detail::positive_weight_positions(inst.w, all_positive);

    BallProjection<Scalar> out;
    if (inst.a == 0) {
        out.x = (inst.w.array() == Scalar(0)).select(inst.y.array(), Scalar(0)).matrix();
        return out;
    }
    if (weighted_l1_norm(inst.y, inst.w) <= inst.a) {
        out.x = inst.y;
        return out;
    }

    Projection<Scalar> abs_proj;
    if (all_positive) {
        abs_proj = solve_simplex(ProblemInstance<Scalar>{inst.y.cwiseAbs(), inst.w, inst.a}, algo);
    } else {
        const Vector<Scalar> abs_y = inst.y.cwiseAbs();
        abs_proj = solve_simplex(detail::gather(abs_y, inst.w, inst.a, keep), algo);
    }

    if (all_positive) {
        out.x = (inst.y.array().sign() * abs_proj.x.array()).matrix();
    } else {
        const Vector<Scalar> kept_y = inst.y(keep);
        out.x = inst.y;
        out.x(keep) = (kept_y.array().sign() * abs_proj.x.array()).matrix();
    }
    out.threshold = abs_proj.result;
    return out;
}

template <typename Scalar>
Vector<Scalar> project_weighted_l1_ball(const ProblemInstance<Scalar> &inst,
                                        AlgorithmChoice algo = AlgorithmChoice::bucket_filter) {
    return project_weighted_l1_ball_detailed(inst, algo).x;
}

} // namespace wl1
