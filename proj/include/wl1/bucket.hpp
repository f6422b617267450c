#pragma once

// Radix-bucket threshold search.
//
// Each pass scatters the active elements into 256 buckets by one byte of an
// order-preserving integer key of z (most significant byte first) while
// accumulating per-bucket sums of w*y, w^2 and counts. Scanning buckets from
// the top with suffix sums C, W, N (plus the carry of buckets already known to
// lie in the support) gives rho_b = (C_b - a) / W_b, which either resolves
// lambda, marks a bucket as entirely inside the support, or selects the single
// bucket that contains the support boundary. Only that bucket is re-scattered
// on the next byte, so at most `digits` passes run.
//
// Work is O(digits * (d + B)): every pass visits its active elements once plus
// the B bucket headers.

#include "wl1/compensated_sum.hpp"
#include "wl1/core.hpp"
#include "wl1/types.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <ranges>
#include <vector>

namespace wl1 {

/// Order-preserving bijection between floating-point values and unsigned keys.
template <typename Scalar>
struct MonotoneKey;

template <>
struct MonotoneKey<double> {
    using Bits = std::uint64_t;
    static constexpr int digits = 8;

    static Bits encode(double z) {
        // -0.0 and +0.0 compare equal, so they must share a key
        const Bits bits = std::bit_cast<Bits>(z + 0.0);
        return (bits & (Bits{1} << 63)) ? ~bits : bits | (Bits{1} << 63);
    }
    static double decode(Bits key) {
        const Bits bits = (key & (Bits{1} << 63)) ? key & ~(Bits{1} << 63) : ~key;
        return std::bit_cast<double>(bits);
    }
    static unsigned digit(Bits key, int pass) {
        return static_cast<unsigned>((key >> (8 * (digits - 1 - pass))) & 0xFFu);
    }
};

template <>
struct MonotoneKey<float> {
    using Bits = std::uint32_t;
    static constexpr int digits = 4;

    static Bits encode(float z) {
        const Bits bits = std::bit_cast<Bits>(z + 0.0f);
        return (bits & (Bits{1} << 31)) ? ~bits : bits | (Bits{1} << 31);
    }
    static float decode(Bits key) {
        const Bits bits = (key & (Bits{1} << 31)) ? key & ~(Bits{1} << 31) : ~key;
        return std::bit_cast<float>(bits);
    }
    static unsigned digit(Bits key, int pass) {
        return static_cast<unsigned>((key >> (8 * (digits - 1 - pass))) & 0xFFu);
    }
};

/// An element scattered into a bucket, carrying its ratio so later passes never
/// touch a dense d-sized array.
template <typename Scalar>
struct BucketItem {
    std::uint32_t index;
    Scalar z;
};

template <typename Scalar>
struct Bucket {
    std::vector<BucketItem<Scalar>> items;
    CompensatedSum<Scalar> wy;
    CompensatedSum<Scalar> ww;
    Scalar zmin{std::numeric_limits<Scalar>::infinity()};
    Scalar zmax{-std::numeric_limits<Scalar>::infinity()};

    bool empty() const { return items.empty(); }

    void clear() {
        items.clear();
        wy = {};
        ww = {};
        zmin = std::numeric_limits<Scalar>::infinity();
        zmax = -std::numeric_limits<Scalar>::infinity();
    }
};

template <typename Scalar>
struct BucketState {
    static constexpr int kBuckets = 256;

    int pass = 0;
    std::array<Bucket<Scalar>, kBuckets> buckets;

    // Elements of buckets above the active bucket of earlier passes; all in the support.
    CompensatedSum<Scalar> carry_wy;
    CompensatedSum<Scalar> carry_ww;
    Index carry_count = 0;

    // Carry plus buckets b..B-1 of the current pass. Entry kBuckets is the carry alone.
    std::array<CompensatedSum<Scalar>, kBuckets + 1> suffix_wy;
    std::array<CompensatedSum<Scalar>, kBuckets + 1> suffix_ww;
    std::array<Index, kBuckets + 1> suffix_n{};

    int active_bucket = -1;

    void clear_buckets() {
        for (auto &b : buckets)
            b.clear();
    }
};

/// rho_b = (C_b - a) / W_b, or -inf when the suffix holds no element.
template <typename Scalar>
Scalar rho_suffix(const BucketState<Scalar> &state, int b, Scalar a) {
    if (state.suffix_n[static_cast<std::size_t>(b)] == 0)
        return -std::numeric_limits<Scalar>::infinity();
    return (state.suffix_wy[static_cast<std::size_t>(b)].value() - a) /
           state.suffix_ww[static_cast<std::size_t>(b)].value();
}

namespace detail {

template <typename Scalar>
std::uint64_t finish_suffix_sums(BucketState<Scalar> &state) {
    constexpr int B = BucketState<Scalar>::kBuckets;
    state.suffix_wy[B] = state.carry_wy;
    state.suffix_ww[B] = state.carry_ww;
    state.suffix_n[B] = state.carry_count;
    for (int b = B - 1; b >= 0; --b) {
        const auto &bucket = state.buckets[static_cast<std::size_t>(b)];
        state.suffix_wy[b] = state.suffix_wy[b + 1];
        state.suffix_wy[b] += bucket.wy;
        state.suffix_ww[b] = state.suffix_ww[b + 1];
        state.suffix_ww[b] += bucket.ww;
        state.suffix_n[b] = state.suffix_n[b + 1] + static_cast<Index>(bucket.items.size());
    }
    return static_cast<std::uint64_t>(B);
}

/// Scatters `active` by digit `pass`. `item_of(element)` yields the (index, z)
/// pair; `admit(item)` decides whether it is kept (filtering).
template <typename Scalar, typename Range, typename ItemOf, typename Admit>
std::uint64_t scatter(BucketState<Scalar> &state, const ProblemInstance<Scalar> &inst, const Range &active,
                      int pass, ItemOf &&item_of, Admit &&admit) {
    using Key = MonotoneKey<Scalar>;
    state.pass = pass;
    state.clear_buckets();
    std::uint64_t visits = 0;
    for (const auto &element : active) {
        ++visits;
        const BucketItem<Scalar> item = item_of(element);
        if (!admit(item))
            continue;
        auto &bucket = state.buckets[Key::digit(Key::encode(item.z), pass)];
        bucket.items.push_back(item);
        const Scalar wi = inst.w[item.index];
        bucket.wy += wi * inst.y[item.index];
        bucket.ww += wi * wi;
        bucket.zmin = std::min(bucket.zmin, item.z);
        bucket.zmax = std::max(bucket.zmax, item.z);
    }
    return visits + finish_suffix_sums(state);
}

} // namespace detail

/// One counting-scatter pass of `active` into 256 buckets by digit `pass` of key(z).
/// Returns the number of visits (|active| elements + B bucket headers).
template <typename Scalar, typename IndexRange>
std::uint64_t scatter_pass(BucketState<Scalar> &state, const ProblemInstance<Scalar> &inst,
                           const Vector<Scalar> &z, const IndexRange &active, int pass) {
    if (pass < 0 || pass >= MonotoneKey<Scalar>::digits)
        throw Error(Errc::InvalidSize, "scatter_pass: digit out of range");
    return detail::scatter(
        state, inst, active, pass,
        [&](auto i) { return BucketItem<Scalar>{static_cast<std::uint32_t>(i), z[static_cast<Index>(i)]}; },
        [](const BucketItem<Scalar> &) { return true; });
}

struct NoBucketObserver {
    template <typename State>
    void on_pass(const State &) {}
    void on_drop(Index) {}
};

/// Below this many active elements the remaining search is finished by sorting.
inline constexpr std::size_t kBucketSortCutoff = 64;

template <typename Scalar, typename Observer = NoBucketObserver>
Projection<Scalar> project_bucket(const ProblemInstance<Scalar> &inst, bool filtering,
                                  Observer &&observer = {}) {
    detail::check_simplex_instance(inst);
    if (inst.size() >= static_cast<Index>(std::numeric_limits<std::uint32_t>::max()))
        throw Error(Errc::InvalidSize, "project_bucket: dimension exceeds 32-bit index range");

    using Item = BucketItem<Scalar>;
    constexpr int B = BucketState<Scalar>::kBuckets;
    constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();
    const Index d = inst.size();
    const Scalar a = inst.a;
    const auto &y = inst.y;
    const auto &w = inst.w;

    BucketState<Scalar> state;
    std::uint64_t visits = 0;

    // Running lower bound of lambda (filtering only): pivot of a subset V that
    // grows with every kept element above it; `bound` is the best bound so far.
    CompensatedSum<Scalar> run_wy, run_ww;
    Scalar run_pivot = kNegInf;
    Scalar bound = kNegInf;
    auto track = [&](const Item &item, bool allow_restart) {
        if (!(item.z > run_pivot))
            return;
        const Scalar wi = w[item.index];
        const Scalar wyi = wi * y[item.index];
        const Scalar own = (wyi - a) / (wi * wi);
        if (allow_restart && own >= run_pivot) {
            run_wy = CompensatedSum<Scalar>(wyi);
            run_ww = CompensatedSum<Scalar>(wi * wi);
            run_pivot = own;
        } else {
            run_wy += wyi;
            run_ww += wi * wi;
            run_pivot = (run_wy.value() - a) / run_ww.value();
        }
        bound = std::max(bound, run_pivot);
    };
    auto admit = [&](const Item &item, bool allow_restart) {
        if (item.z < bound) {
            observer.on_drop(static_cast<Index>(item.index));
            return false;
        }
        track(item, allow_restart);
        return true;
    };
    auto keep_all = [](const Item &) { return true; };
    auto same_item = [](const Item &item) { return item; };

    auto finish = [&](Scalar lambda, Index support) {
        Projection<Scalar> out;
        out.x = apply_threshold(inst, lambda);
        out.result = {lambda, support, visits};
        return out;
    };

    // Sort-based finish of a small active set on top of the carry.
    auto finish_sorted = [&](std::vector<Item> items) {
        visits += items.size();
        std::sort(items.begin(), items.end(), [](const Item &l, const Item &r) { return l.z > r.z; });
        const auto scan = detail::scan_sorted(
            inst, items | std::views::transform([](const Item &item) { return static_cast<Index>(item.index); }),
            state.carry_wy, state.carry_ww, state.carry_count);
        return finish(scan.lambda, scan.support);
    };

    auto item_at = [&](Index i) { return Item{static_cast<std::uint32_t>(i), y[i] / w[i]}; };

    if (static_cast<std::size_t>(d) < kBucketSortCutoff) {
        std::vector<Item> all;
        all.reserve(static_cast<std::size_t>(d));
        for (Index i = 0; i < d; ++i)
            all.push_back(item_at(i));
        return finish_sorted(std::move(all));
    }

    // pass 0 computes z on the fly
    const auto everything = std::views::iota(Index{0}, d);
    if (filtering)
        visits += detail::scatter(state, inst, everything, 0, item_at,
                                  [&](const Item &item) { return admit(item, true); });
    else
        visits += detail::scatter(state, inst, everything, 0, item_at, keep_all);

    std::vector<Item> active;
    for (int pass = 0;; ++pass) {
        state.active_bucket = -1;
        int lowest_nonempty = -1;
        for (int b = B - 1; b >= 0; --b) {
            const auto &bucket = state.buckets[static_cast<std::size_t>(b)];
            if (bucket.empty())
                continue;
            lowest_nonempty = b;
            const Scalar rho_above = rho_suffix(state, b + 1, a);
            if (rho_above > bucket.zmax) {
                // boundary lies between this bucket and the buckets above
                observer.on_pass(state);
                return finish(rho_above, state.suffix_n[b + 1]);
            }
            const Scalar rho_here = rho_suffix(state, b, a);
            if (rho_here >= bucket.zmin) {
                state.active_bucket = b;
                bound = std::max({bound, rho_above, rho_here});
                break;
            }
        }
        observer.on_pass(state);

        if (state.active_bucket < 0) {
            // every active element is in the support (or everything was filtered)
            if (lowest_nonempty < 0)
                return finish(rho_suffix(state, B, a), state.carry_count);
            return finish(rho_suffix(state, lowest_nonempty, a), state.suffix_n[lowest_nonempty]);
        }

        const auto b = static_cast<std::size_t>(state.active_bucket);
        state.carry_wy = state.suffix_wy[b + 1];
        state.carry_ww = state.suffix_ww[b + 1];
        state.carry_count = state.suffix_n[b + 1];
        active.swap(state.buckets[b].items);

        if (pass + 1 == MonotoneKey<Scalar>::digits) {
            // all digits consumed: the active elements share one z value
            if (state.carry_count > 0)
                return finish((state.carry_wy.value() - a) / state.carry_ww.value(), state.carry_count);
            return finish(rho_suffix(state, static_cast<int>(b), a), state.suffix_n[b]);
        }
        if (active.size() < kBucketSortCutoff)
            return finish_sorted(std::move(active));

        if (filtering) {
            // reseed the running subset with the carry; the old one may overlap `active`
            run_wy = state.carry_wy;
            run_ww = state.carry_ww;
            run_pivot = kNegInf;
            if (state.carry_count > 0) {
                run_pivot = (run_wy.value() - a) / run_ww.value();
                bound = std::max(bound, run_pivot);
            }
            visits += detail::scatter(state, inst, active, pass + 1, same_item,
                                      [&](const Item &item) { return admit(item, false); });
        } else {
            visits += detail::scatter(state, inst, active, pass + 1, same_item, keep_all);
        }
    }
}

} // namespace wl1
