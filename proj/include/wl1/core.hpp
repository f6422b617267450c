#pragma once

// Shared projection primitives and the sort-based reference algorithms.
//
// All weighted algorithms search for the threshold lambda such that
//   x_i = max(y_i - w_i * lambda, 0),   sum_i w_i x_i = a.
// With z_i = y_i / w_i sorted decreasingly, lambda = rho_K where
//   rho_k = (sum_{j<=k} w_(j) y_(j) - a) / sum_{j<=k} w_(j)^2
// and K is the largest k with rho_k < z_(k).

#include "wl1/compensated_sum.hpp"
#include "wl1/types.hpp"

#include <algorithm>
#include <functional>
#include <ranges>
#include <span>
#include <vector>

namespace wl1 {

/// x_i = max(y_i - w_i * lambda, 0). Final step of every backend.
template <typename Scalar>
Vector<Scalar> apply_threshold(const ProblemInstance<Scalar> &inst, Scalar lambda) {
    return (inst.y - inst.w * lambda).cwiseMax(Scalar(0));
}

/// sum_i w_i |x_i| with compensated accumulation.
template <typename DerivedX, typename DerivedW>
typename DerivedX::Scalar weighted_l1_norm(const Eigen::MatrixBase<DerivedX> &x,
                                           const Eigen::MatrixBase<DerivedW> &w) {
    using Scalar = typename DerivedX::Scalar;
    if (x.size() != w.size())
        throw Error(Errc::LengthMismatch, "weighted_l1_norm: x and w differ in length");
    CompensatedSum<Scalar> acc;
    for (Index i = 0; i < x.size(); ++i)
        acc += w[i] * std::abs(x[i]);
    return acc.value();
}

/// Lower bound of lambda from any nonempty index subset V:
///   p_V = (sum_V w_i y_i - a) / sum_V w_i^2.
template <typename Scalar>
Scalar subsequence_pivot(const ProblemInstance<Scalar> &inst, std::span<const Index> subset) {
    if (subset.empty())
        throw Error(Errc::EmptySubsequence, "subsequence_pivot: empty index set");
    CompensatedSum<Scalar> wy, ww;
    for (Index i : subset) {
        if (i < 0 || i >= inst.size())
            throw Error(Errc::MissingIndex, "subsequence_pivot: index out of range");
        wy += inst.w[i] * inst.y[i];
        ww += inst.w[i] * inst.w[i];
    }
    return (wy.value() - inst.a) / ww.value();
}

/// z = y / w together with a permutation sorting z non-decreasingly.
template <typename Scalar>
struct RatioView {
    Vector<Scalar> z;
    std::vector<Index> order;
};

template <typename Scalar>
RatioView<Scalar> make_ratio_view(const ProblemInstance<Scalar> &inst) {
    RatioView<Scalar> view;
    view.z = inst.y.cwiseQuotient(inst.w);
    struct Keyed {
        Scalar z;
        Index i;
    };
    std::vector<Keyed> keyed(static_cast<std::size_t>(inst.size()));
    for (Index i = 0; i < inst.size(); ++i)
        keyed[static_cast<std::size_t>(i)] = {view.z[i], i};
    std::sort(keyed.begin(), keyed.end(), [](const Keyed &l, const Keyed &r) { return l.z < r.z; });
    view.order.resize(keyed.size());
    std::transform(keyed.begin(), keyed.end(), view.order.begin(), [](const Keyed &k) { return k.i; });
    return view;
}

namespace detail {

template <typename Scalar>
struct ScanResult {
    Scalar lambda;
    Index support;
};

/// Threshold scan over candidates given in decreasing z order, on top of a
/// carried set already known to be in the support (carry sums may be empty).
/// Picks the largest k with rho_k < z_(k); k == 0 means only the carry.
template <typename Scalar, typename Range>
ScanResult<Scalar> scan_sorted(const ProblemInstance<Scalar> &inst, const Range &decreasing,
                               CompensatedSum<Scalar> carry_wy, CompensatedSum<Scalar> carry_ww,
                               Index carry_count) {
    CompensatedSum<Scalar> wy = carry_wy, ww = carry_ww;
    Scalar best = carry_count > 0 ? (carry_wy.value() - inst.a) / carry_ww.value()
                                  : -std::numeric_limits<Scalar>::infinity();
    Index best_k = 0;
    Index k = 0;
    for (Index i : decreasing) {
        ++k;
        const Scalar wi = inst.w[i];
        wy += wi * inst.y[i];
        ww += wi * wi;
        const Scalar rho = (wy.value() - inst.a) / ww.value();
        if (rho < inst.y[i] / wi) {
            best = rho;
            best_k = k;
        }
    }
    return {best, carry_count + best_k};
}

} // namespace detail

/// Unweighted sort-based simplex projection: x_i = max(y_i - tau, 0), sum x = a.
template <typename Derived>
Projection<typename Derived::Scalar> simplex_sort(const Eigen::MatrixBase<Derived> &y,
                                                  typename Derived::Scalar a) {
    using Scalar = typename Derived::Scalar;
    const Index d = y.size();
    if (d == 0)
        throw Error(Errc::EmptyInput, "simplex_sort: empty input");
    if (!(a > 0) || !std::isfinite(a))
        throw Error(Errc::InvalidRadius, "simplex_sort: level must be positive");

    std::vector<Scalar> u(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i)
        u[static_cast<std::size_t>(i)] = y[i];
    std::sort(u.begin(), u.end(), std::greater<Scalar>());

    CompensatedSum<Scalar> acc;
    Scalar tau = 0;
    Index support = 0;
    for (Index k = 0; k < d; ++k) {
        acc += u[static_cast<std::size_t>(k)];
        const Scalar rho = (acc.value() - a) / static_cast<Scalar>(k + 1);
        if (rho < u[static_cast<std::size_t>(k)]) {
            tau = rho;
            support = k + 1;
        }
    }

    Projection<Scalar> out;
    out.x = (y.array() - tau).cwiseMax(Scalar(0)).matrix();
    out.result = {tau, support, static_cast<std::uint64_t>(2 * d)};
    return out;
}

/// Weighted sort-based simplex projection; reference oracle for the other backends.
template <typename Scalar>
Projection<Scalar> weighted_simplex_sort(const ProblemInstance<Scalar> &inst) {
    detail::check_simplex_instance(inst);
    const RatioView<Scalar> view = make_ratio_view(inst);
    const auto scan = detail::scan_sorted(inst, view.order | std::views::reverse,
                                          CompensatedSum<Scalar>{}, CompensatedSum<Scalar>{}, 0);
    Projection<Scalar> out;
    out.x = apply_threshold(inst, scan.lambda);
    out.result = {scan.lambda, scan.support, static_cast<std::uint64_t>(2 * inst.size())};
    return out;
}

} // namespace wl1
