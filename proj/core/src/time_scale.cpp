#include "chronoscale/time_scale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "chronoscale/errors.hpp"

namespace chronoscale {

namespace {

std::string describe(const Piece& p) {
    std::ostringstream os;
    os.precision(17);
    os << '[' << p.lo << ", " << p.hi << ']';
    return os.str();
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); }

void validate_ordered(const std::vector<Piece>& pieces, const char* name, bool allow_infinite_ends) {
    if (pieces.empty()) invalid(std::string(name) + ": at least one piece is required");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const Piece& p = pieces[i];
        const std::string where = std::string(name) + "[" + std::to_string(i) + "]";
        if (std::isnan(p.lo) || std::isnan(p.hi)) invalid(where + ": endpoint is NaN");
        if (p.lo > p.hi) invalid(where + " " + describe(p) + ": lo > hi");
        const bool lo_ok = std::isfinite(p.lo) || (allow_infinite_ends && i == 0 && p.lo < 0);
        const bool hi_ok =
            std::isfinite(p.hi) || (allow_infinite_ends && i + 1 == pieces.size() && p.hi > 0);
        if (!lo_ok || !hi_ok) invalid(where + " " + describe(p) + ": endpoint must be finite");
        if (i > 0) {
            const Piece& q = pieces[i - 1];
            if (p.lo < q.lo) {
                invalid(where + " " + describe(p) + " is not ordered after " + name + "[" +
                        std::to_string(i - 1) + "] " + describe(q));
            }
            if (!(q.hi < p.lo)) {
                invalid(where + " " + describe(p) + " overlaps " + name + "[" +
                        std::to_string(i - 1) + "] " + describe(q));
            }
        }
    }
}

std::int64_t cycle_of(const PeriodicGenerator& g, double t) {
    return static_cast<std::int64_t>(std::floor((t - g.origin) / g.period));
}

}  // namespace

TimeScale TimeScale::from_pieces(std::vector<Piece> pieces) {
    validate_ordered(pieces, "pieces", true);
    TimeScale ts;
    ts.pieces_ = std::move(pieces);
    return ts;
}

TimeScale TimeScale::from_generator(PeriodicGenerator generator) {
    if (!(generator.period > 0.0) || !std::isfinite(generator.period)) {
        invalid("period must be positive and finite");
    }
    if (!std::isfinite(generator.origin)) invalid("origin must be finite");
    validate_ordered(generator.pattern, "pattern", false);
    if (generator.pattern.front().lo < 0.0) invalid("pattern offsets must be nonnegative");
    if (!(generator.pattern.back().hi < generator.pattern.front().lo + generator.period)) {
        invalid("pattern must leave a gap before its next repetition (last hi < first lo + period)");
    }
    TimeScale ts;
    ts.generator_ = std::move(generator);
    return ts;
}

double TimeScale::infimum() const noexcept {
    return generator_ ? -kInfinity : pieces_.front().lo;
}

double TimeScale::supremum() const noexcept {
    return generator_ ? kInfinity : pieces_.back().hi;
}

bool TimeScale::contains(double t) const { return find_piece(t).has_value(); }

PieceCursor TimeScale::periodic_piece(std::int64_t cycle, std::size_t slot) const {
    const PeriodicGenerator& g = *generator_;
    const double base = g.origin + static_cast<double>(cycle) * g.period;
    return PieceCursor{Piece{base + g.pattern[slot].lo, base + g.pattern[slot].hi}, cycle, slot};
}

std::optional<PieceCursor> TimeScale::find_piece(double t) const {
    if (std::isnan(t)) return std::nullopt;
    if (!generator_) {
        auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                                   [](double v, const Piece& p) { return v < p.lo; });
        if (it == pieces_.begin()) return std::nullopt;
        --it;
        if (!it->contains(t)) return std::nullopt;
        return PieceCursor{*it, 0, static_cast<std::size_t>(it - pieces_.begin())};
    }
    if (!std::isfinite(t)) return std::nullopt;
    const std::int64_t k0 = cycle_of(*generator_, t);
    // Rounding in (t - origin) / period can place t one cycle off either way.
    for (std::int64_t k = k0 - 1; k <= k0 + 1; ++k) {
        for (std::size_t j = 0; j < generator_->pattern.size(); ++j) {
            PieceCursor c = periodic_piece(k, j);
            if (c.piece.contains(t)) return c;
        }
    }
    return std::nullopt;
}

std::optional<PieceCursor> TimeScale::next(const PieceCursor& cursor) const {
    if (!generator_) {
        if (cursor.slot + 1 >= pieces_.size()) return std::nullopt;
        return PieceCursor{pieces_[cursor.slot + 1], 0, cursor.slot + 1};
    }
    if (cursor.slot + 1 < generator_->pattern.size()) {
        return periodic_piece(cursor.cycle, cursor.slot + 1);
    }
    return periodic_piece(cursor.cycle + 1, 0);
}

std::optional<PieceCursor> TimeScale::prev(const PieceCursor& cursor) const {
    if (!generator_) {
        if (cursor.slot == 0) return std::nullopt;
        return PieceCursor{pieces_[cursor.slot - 1], 0, cursor.slot - 1};
    }
    if (cursor.slot > 0) return periodic_piece(cursor.cycle, cursor.slot - 1);
    return periodic_piece(cursor.cycle - 1, generator_->pattern.size() - 1);
}

std::vector<PieceCursor> TimeScale::expand(Window window) const {
    std::vector<PieceCursor> out;
    if (window.lo > window.hi) return out;
    if (!generator_) {
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const Piece& p = pieces_[i];
            if (p.hi < window.lo) continue;
            if (p.lo > window.hi) break;
            out.push_back(PieceCursor{p, 0, i});
        }
        return out;
    }
    if (!std::isfinite(window.lo) || !std::isfinite(window.hi)) {
        throw Error(ErrorCode::WindowExhausted, "periodic scale cannot be expanded on an unbounded window");
    }
    const PeriodicGenerator& g = *generator_;
    const double cycles =
        std::floor((window.hi - g.origin) / g.period) - std::floor((window.lo - g.origin) / g.period) + 3.0;
    if (cycles * static_cast<double>(g.pattern.size()) > static_cast<double>(kExpansionBudget)) {
        throw Error(ErrorCode::WindowExhausted,
                    "window needs more than " + std::to_string(kExpansionBudget) + " pieces");
    }
    const std::int64_t k_lo = cycle_of(g, window.lo) - 1;
    const std::int64_t k_hi = cycle_of(g, window.hi) + 1;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        for (std::size_t j = 0; j < g.pattern.size(); ++j) {
            PieceCursor c = periodic_piece(k, j);
            if (c.piece.hi < window.lo || c.piece.lo > window.hi) continue;
            out.push_back(c);
        }
    }
    return out;
}

namespace {

PieceCursor require_piece(const TimeScale& ts, double t) {
    auto c = ts.find_piece(t);
    if (!c) {
        std::ostringstream os;
        os.precision(17);
        os << "t = " << t << " is not a point of the time scale";
        throw Error(ErrorCode::PointNotInScale, os.str());
    }
    return *c;
}

}  // namespace

JumpValue sigma(const TimeScale& ts, double t) {
    const PieceCursor c = require_piece(ts, t);
    if (t < c.piece.hi) return {t, false};
    if (auto n = ts.next(c)) return {n->piece.lo, false};
    return {t, true};
}

JumpValue rho(const TimeScale& ts, double t) {
    const PieceCursor c = require_piece(ts, t);
    if (t > c.piece.lo) return {t, false};
    if (auto p = ts.prev(c)) return {p->piece.hi, false};
    return {t, true};
}

double graininess(const TimeScale& ts, double t) { return sigma(ts, t).value - t; }

PointClass classify(const TimeScale& ts, double t) {
    const JumpValue s = sigma(ts, t);
    const JumpValue r = rho(ts, t);
    PointClass pc;
    pc.right = s.value > t ? Density::Scattered : Density::Dense;
    pc.left = r.value < t ? Density::Scattered : Density::Dense;
    pc.isolated = pc.right == Density::Scattered && pc.left == Density::Scattered;
    pc.at_max = s.at_boundary;
    pc.at_min = r.at_boundary;
    return pc;
}

std::vector<double> scattered_points(const TimeScale& ts, Window window) {
    std::vector<double> out;
    for (const PieceCursor& c : ts.expand(window)) {
        const double t = c.piece.hi;
        if (t < window.lo || !(t < window.hi)) continue;
        if (ts.next(c)) out.push_back(t);
    }
    return out;
}

std::vector<Piece> segments(const TimeScale& ts, Window window) {
    std::vector<Piece> out;
    for (const PieceCursor& c : ts.expand(window)) {
        const Piece clipped{std::max(c.piece.lo, window.lo), std::min(c.piece.hi, window.hi)};
        if (clipped.lo <= clipped.hi) out.push_back(clipped);
    }
    return out;
}

TimeScale make_scale(const ScaleSpec& spec) {
    struct Builder {
        TimeScale operator()(const spec::RealLine& s) const {
            if (std::isnan(s.lo) || std::isnan(s.hi) || s.lo > s.hi) invalid("real line: require lo <= hi");
            if (s.lo == kInfinity || s.hi == -kInfinity) invalid("real line: empty interval");
            return TimeScale::from_pieces({Piece{s.lo, s.hi}});
        }
        TimeScale operator()(const spec::HIntegers& s) const {
            if (!(s.h > 0.0) || !std::isfinite(s.h)) invalid("h_integers: h must be positive and finite");
            return TimeScale::from_generator(PeriodicGenerator{s.h, s.origin, {Piece{0.0, 0.0}}});
        }
        TimeScale operator()(const spec::PeriodicUnion& s) const {
            if (!(s.a > 0.0) || !std::isfinite(s.a)) invalid("periodic: a must be positive and finite");
            if (!(s.b > 0.0) || !std::isfinite(s.b)) invalid("periodic: b must be positive and finite");
            return TimeScale::from_generator(PeriodicGenerator{s.a + s.b, s.origin, {Piece{0.0, s.a}}});
        }
        TimeScale operator()(const spec::Pattern& s) const { return TimeScale::from_generator(s.generator); }
        TimeScale operator()(const spec::PieceList& s) const { return TimeScale::from_pieces(s.pieces); }
    };
    return std::visit(Builder{}, spec);
}

std::optional<double> snap_to_scale(const TimeScale& ts, double t, double tol) {
    if (ts.contains(t)) return t;
    if (!(tol > 0.0)) return std::nullopt;
    std::optional<double> best;
    for (const PieceCursor& c : ts.expand(Window{t - tol, t + tol})) {
        const double candidate = std::clamp(t, c.piece.lo, c.piece.hi);
        if (std::abs(candidate - t) > tol) continue;
        if (!best || std::abs(candidate - t) < std::abs(*best - t)) best = candidate;
    }
    return best;
}

}  // namespace chronoscale
