#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace wl1 {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Relative tolerance used for feasibility and cross-backend agreement.
inline constexpr double kRelTol = 1e-9;

enum class Errc {
    EmptyInput,
    InvalidRadius,
    NegativeRadius,
    NonPositiveWeight,
    LengthMismatch,
    EmptySubsequence,
    DuplicateIndex,
    MissingIndex,
    InvalidP,
    InvalidEpsilon,
    DimensionMismatch,
    InvalidSize,
    Malformed,
    Io,
    Invariant,
};

inline const char *to_string(Errc code) {
    switch (code) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InvalidRadius: return "InvalidRadius";
    case Errc::NegativeRadius: return "NegativeRadius";
    case Errc::NonPositiveWeight: return "NonPositiveWeight";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptySubsequence: return "EmptySubsequence";
    case Errc::DuplicateIndex: return "DuplicateIndex";
    case Errc::MissingIndex: return "MissingIndex";
    case Errc::InvalidP: return "InvalidP";
    case Errc::InvalidEpsilon: return "InvalidEpsilon";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidSize: return "InvalidSize";
    case Errc::Malformed: return "Malformed";
    case Errc::Io: return "Io";
    case Errc::Invariant: return "Invariant";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

/// One projection problem: point y, weights w, radius / simplex level a.
template <typename Scalar>
struct ProblemInstance {
    Vector<Scalar> y;
    Vector<Scalar> w;
    Scalar a{1};

    Index size() const { return y.size(); }
};

/// Outcome of one threshold search.
template <typename Scalar>
struct ThresholdResult {
    Scalar lambda{0};
    Index support_size{0};
    // element visits performed by the search (the final thresholding pass is not counted)
    std::uint64_t ops_visited{0};
};

template <typename Scalar>
struct Projection {
    Vector<Scalar> x;
    ThresholdResult<Scalar> result;
};

namespace detail {

template <typename Scalar>
void check_simplex_instance(const ProblemInstance<Scalar> &inst) {
    if (inst.y.size() == 0)
        throw Error(Errc::EmptyInput, "empty input vector");
    if (inst.w.size() != inst.y.size())
        throw Error(Errc::LengthMismatch, "y and w differ in length");
    if (!(inst.a > 0) || !std::isfinite(inst.a))
        throw Error(Errc::InvalidRadius, "simplex level must be positive and finite");
    for (Index i = 0; i < inst.w.size(); ++i)
        if (!(inst.w[i] > 0))
            throw Error(Errc::NonPositiveWeight, "weight " + std::to_string(i) + " is not positive");
}

} // namespace detail

} // namespace wl1
