#pragma once

// Time scales: nonempty closed subsets of the real line, described finitely as
// an ordered list of closed pieces or as a periodic pattern of pieces.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

namespace chronoscale {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Closed interval [lo, hi]; lo == hi is an isolated point.
struct Piece {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] bool is_point() const noexcept { return lo == hi; }
    [[nodiscard]] bool contains(double t) const noexcept { return lo <= t && t <= hi; }
    bool operator==(const Piece&) const = default;
};

/// Closed query window [lo, hi].
struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

/// Pattern pieces are offsets from origin + k * period, k ranging over all integers.
struct PeriodicGenerator {
    double period = 1.0;
    double origin = 0.0;
    std::vector<Piece> pattern;
    bool operator==(const PeriodicGenerator&) const = default;
};

namespace spec {

/// [lo, hi] of the real line; either end may be infinite.
struct RealLine {
    double lo = -kInfinity;
    double hi = kInfinity;
    bool operator==(const RealLine&) const = default;
};

/// origin + h * Z
struct HIntegers {
    double h = 1.0;
    double origin = 0.0;
    bool operator==(const HIntegers&) const = default;
};

/// Union over k of [origin + k(a+b), origin + k(a+b) + a]: dense runs of
/// length a separated by gaps of length b.
struct PeriodicUnion {
    double a = 1.0;
    double b = 1.0;
    double origin = 0.0;
    bool operator==(const PeriodicUnion&) const = default;
};

struct Pattern {
    PeriodicGenerator generator;
    bool operator==(const Pattern&) const = default;
};

/// Explicit ordered pieces. Only the first lo and the last hi may be infinite.
struct PieceList {
    std::vector<Piece> pieces;
    bool operator==(const PieceList&) const = default;
};

}  // namespace spec

using ScaleSpec = std::variant<spec::RealLine, spec::HIntegers, spec::PeriodicUnion, spec::Pattern,
                               spec::PieceList>;

/// A concrete piece together with its position in the scale.
struct PieceCursor {
    Piece piece;
    std::int64_t cycle = 0;  // always 0 for explicit scales
    std::size_t slot = 0;
};

class TimeScale {
public:
    /// Largest number of concrete pieces a single window expansion may produce.
    static constexpr std::size_t kExpansionBudget = 10'000'000;

    /// Validated construction; throws Error(InvalidSpec) on bad input.
    static TimeScale from_pieces(std::vector<Piece> pieces);
    static TimeScale from_generator(PeriodicGenerator generator);

    [[nodiscard]] bool is_periodic() const noexcept { return generator_.has_value(); }
    [[nodiscard]] const std::optional<PeriodicGenerator>& generator() const noexcept {
        return generator_;
    }
    /// Explicit pieces (empty for periodic scales).
    [[nodiscard]] const std::vector<Piece>& pieces() const noexcept { return pieces_; }

    [[nodiscard]] double infimum() const noexcept;
    [[nodiscard]] double supremum() const noexcept;

    [[nodiscard]] bool contains(double t) const;
    [[nodiscard]] std::optional<PieceCursor> find_piece(double t) const;
    [[nodiscard]] std::optional<PieceCursor> next(const PieceCursor& cursor) const;
    [[nodiscard]] std::optional<PieceCursor> prev(const PieceCursor& cursor) const;

    /// Concrete (unclipped) pieces that intersect the window, ascending.
    /// Throws Error(WindowExhausted) when a periodic scale would need more than
    /// kExpansionBudget pieces, including any unbounded window.
    [[nodiscard]] std::vector<PieceCursor> expand(Window window) const;

    bool operator==(const TimeScale&) const = default;

private:
    TimeScale() = default;

    [[nodiscard]] PieceCursor periodic_piece(std::int64_t cycle, std::size_t slot) const;

    std::vector<Piece> pieces_;
    std::optional<PeriodicGenerator> generator_;
};

/// Result of a jump operator. at_boundary marks the scale maximum (for sigma)
/// or minimum (for rho), where the operator returns t itself.
struct JumpValue {
    double value = 0.0;
    bool at_boundary = false;
};

enum class Density { Dense, Scattered };

struct PointClass {
    Density right = Density::Dense;
    Density left = Density::Dense;
    bool isolated = false;  // scattered on both sides
    bool at_min = false;
    bool at_max = false;
};

/// Forward jump inf{s in ts : s > t}. Throws Error(PointNotInScale).
[[nodiscard]] JumpValue sigma(const TimeScale& ts, double t);
/// Backward jump sup{s in ts : s < t}. Throws Error(PointNotInScale).
[[nodiscard]] JumpValue rho(const TimeScale& ts, double t);
/// sigma(t) - t.
[[nodiscard]] double graininess(const TimeScale& ts, double t);
[[nodiscard]] PointClass classify(const TimeScale& ts, double t);

/// Right-scattered points of ts in the half-open window [lo, hi), ascending.
[[nodiscard]] std::vector<double> scattered_points(const TimeScale& ts, Window window);

/// Maximal intervals and isolated points of ts intersected with the window.
/// Pieces with lo == hi are isolated points.
[[nodiscard]] std::vector<Piece> segments(const TimeScale& ts, Window window);

[[nodiscard]] TimeScale make_scale(const ScaleSpec& spec);

/// Nearest point of ts within tol of t, if any. Intended for snapping
/// user-entered times during scenario ingestion; queries never snap.
[[nodiscard]] std::optional<double> snap_to_scale(const TimeScale& ts, double t, double tol);

}  // namespace chronoscale
