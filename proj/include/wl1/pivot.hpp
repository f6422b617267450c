#pragma once

// Pivot-based threshold search with lower-bound pivots and online filtering.
//
// Phase 1 reads y once, maintaining a candidate set V whose pivot
//   p_V = (sum_V w_i y_i - a) / sum_V w_i^2
// is always a lower bound of lambda; elements with z_i <= p_V are dropped on
// the fly. When a single element's own bound beats the pivot, V is spilled and
// restarted from that element. Phase 2 re-admits spilled elements above the
// pivot, phase 3 repeatedly drops members below the pivot until V is stable,
// at which point V is the support and p_V is lambda.

#include "wl1/compensated_sum.hpp"
#include "wl1/core.hpp"
#include "wl1/types.hpp"

#include <cassert>
#include <vector>

namespace wl1 {

template <typename Scalar>
class CandidateSet {
  public:
    static constexpr std::uint32_t npos = std::numeric_limits<std::uint32_t>::max();

    explicit CandidateSet(Index d) : position_(static_cast<std::size_t>(d), npos) {
        if (d >= static_cast<Index>(npos))
            throw Error(Errc::InvalidSize, "CandidateSet: dimension exceeds 32-bit index range");
    }

    const std::vector<std::uint32_t> &active() const { return active_; }
    const std::vector<std::uint32_t> &spilled() const { return spilled_; }
    std::size_t size() const { return active_.size(); }
    bool empty() const { return active_.empty(); }
    bool contains(Index i) const { return position_[static_cast<std::size_t>(i)] != npos; }

    Scalar pivot() const { return pivot_; }
    Scalar sum_wy() const { return wy_.value(); }
    Scalar sum_ww() const { return ww_.value(); }

    void insert(Index i, Scalar wi, Scalar yi) {
        position_[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(active_.size());
        active_.push_back(static_cast<std::uint32_t>(i));
        wy_ += wi * yi;
        ww_ += wi * wi;
    }

    void erase_at(std::size_t pos, Scalar wi, Scalar yi) {
        const std::uint32_t removed = active_[pos];
        const std::uint32_t last = active_.back();
        active_[pos] = last;
        position_[last] = static_cast<std::uint32_t>(pos);
        active_.pop_back();
        position_[removed] = npos;
        wy_ -= wi * yi;
        ww_ -= wi * wi;
    }

    std::size_t position(Index i) const { return position_[static_cast<std::size_t>(i)]; }

    /// Moves V into the spill list and restarts V as {i}.
    void restart(Index i, Scalar wi, Scalar yi) {
        for (std::uint32_t j : active_)
            position_[j] = npos;
        spilled_.insert(spilled_.end(), active_.begin(), active_.end());
        active_.clear();
        wy_ = {};
        ww_ = {};
        insert(i, wi, yi);
    }

    void clear_spilled() { spilled_.clear(); }

    void refresh_pivot(Scalar a) { pivot_ = (wy_.value() - a) / ww_.value(); }

    /// Recomputes both sums over V from scratch.
    void recompute(const ProblemInstance<Scalar> &inst) {
        wy_ = {};
        ww_ = {};
        for (std::uint32_t j : active_) {
            wy_ += inst.w[j] * inst.y[j];
            ww_ += inst.w[j] * inst.w[j];
        }
        refresh_pivot(inst.a);
    }

  private:
    std::vector<std::uint32_t> active_;
    std::vector<std::uint32_t> spilled_;
    std::vector<std::uint32_t> position_;
    CompensatedSum<Scalar> wy_;
    CompensatedSum<Scalar> ww_;
    Scalar pivot_{-std::numeric_limits<Scalar>::infinity()};
};

/// Adds index i to V and updates the pivot in O(1).
template <typename Scalar>
void pivot_update_add(CandidateSet<Scalar> &set, Index i, const ProblemInstance<Scalar> &inst) {
    if (i < 0 || i >= inst.size())
        throw Error(Errc::MissingIndex, "pivot_update_add: index out of range");
    if (set.contains(i))
        throw Error(Errc::DuplicateIndex, "pivot_update_add: index already in candidate set");
    set.insert(i, inst.w[i], inst.y[i]);
    set.refresh_pivot(inst.a);
}

/// Removes index i from V and updates the pivot in O(1).
template <typename Scalar>
void pivot_update_remove(CandidateSet<Scalar> &set, Index i, const ProblemInstance<Scalar> &inst) {
    if (i < 0 || i >= inst.size() || !set.contains(i))
        throw Error(Errc::MissingIndex, "pivot_update_remove: index not in candidate set");
    set.erase_at(set.position(i), inst.w[i], inst.y[i]);
    if (!set.empty())
        set.refresh_pivot(inst.a);
}

/// Hooks for instrumented runs; the default does nothing.
struct NoPivotObserver {
    template <typename Scalar>
    void on_pivot(Scalar) {}
    void on_discard(Index) {}
    void on_pass_end(std::size_t) {}
};

template <typename Scalar, typename Observer = NoPivotObserver>
Projection<Scalar> project_pivot(const ProblemInstance<Scalar> &inst, Observer &&observer = {}) {
    detail::check_simplex_instance(inst);
    const Index d = inst.size();
    const Scalar a = inst.a;
    const auto &y = inst.y;
    const auto &w = inst.w;

    CandidateSet<Scalar> set(d);
    std::uint64_t visits = 1;

    set.insert(0, w[0], y[0]);
    set.refresh_pivot(a);
    observer.on_pivot(set.pivot());

    // phase 1: single pass with online filtering
    for (Index n = 1; n < d; ++n) {
        ++visits;
        const Scalar wn = w[n];
        const Scalar yn = y[n];
        if (!(yn / wn > set.pivot())) {
            observer.on_discard(n);
            continue;
        }
        set.insert(n, wn, yn);
        set.refresh_pivot(a);
        const Scalar own_bound = (wn * yn - a) / (wn * wn);
        if (!(own_bound < set.pivot())) {
            set.erase_at(set.active().size() - 1, wn, yn);
            set.restart(n, wn, yn);
            set.refresh_pivot(a);
        }
        observer.on_pivot(set.pivot());
    }

    // phase 2: re-admit spilled elements above the pivot
    for (std::uint32_t n : set.spilled()) {
        ++visits;
        if (y[n] / w[n] > set.pivot()) {
            set.insert(n, w[n], y[n]);
            set.refresh_pivot(a);
            observer.on_pivot(set.pivot());
        } else {
            observer.on_discard(n);
        }
    }
    set.clear_spilled();

    // phase 3: shrink V until stable
    set.recompute(inst);
    visits += set.size();
    observer.on_pivot(set.pivot());
    std::size_t before = 0;
    do {
        before = set.size();
        for (std::size_t pos = 0; pos < set.size();) {
            ++visits;
            const std::uint32_t n = set.active()[pos];
            if (y[n] / w[n] < set.pivot()) {
                set.erase_at(pos, w[n], y[n]);
                set.refresh_pivot(a);
                observer.on_pivot(set.pivot());
            } else {
                ++pos;
            }
        }
        observer.on_pass_end(set.size());
    } while (set.size() != before);

    // V cannot empty out: the largest z always stays above every lower bound.
    if (set.empty())
        throw Error(Errc::Invariant, "project_pivot: candidate set emptied");
    set.recompute(inst);
    visits += set.size();

    Projection<Scalar> out;
    out.x = apply_threshold(inst, set.pivot());
    out.result = {set.pivot(), static_cast<Index>(set.size()), visits};
    return out;
}

} // namespace wl1
