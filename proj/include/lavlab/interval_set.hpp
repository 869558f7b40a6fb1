// Interval-set algebra on [0,1] and the partition algorithms built on it:
// separation of disjoint closed sets into finitely many intervals, level-set
// partitions with measure control, and the dyadic counterexample set whose
// finite truncations force arbitrarily many intervals.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lavlab/func_model.hpp"
#include "lavlab/rational.hpp"

namespace lavlab {

// One interval with endpoint-inclusion flags.
template <class Num>
struct BasicInterval {
    Num lo{}, hi{};
    bool lo_closed = true;
    bool hi_closed = true;

    bool empty() const {
        if (lo < hi) return false;
        if (hi < lo) return true;
        return !(lo_closed && hi_closed);
    }
    bool degenerate() const { return !(lo < hi) && !empty(); }
    Num length() const { return empty() ? Num(0) : hi - lo; }
    bool contains(const Num& x) const {
        if (x < lo || hi < x) return false;
        if (x == lo && !lo_closed) return false;
        if (x == hi && !hi_closed) return false;
        return true;
    }
    std::string to_string() const;
};

// Finite union of disjoint intervals, kept sorted and normalized: adjacent
// components are merged whenever their union is itself an interval.
template <class Num>
class BasicIntervalSet {
public:
    using Interval = BasicInterval<Num>;

    BasicIntervalSet() = default;
    explicit BasicIntervalSet(std::vector<Interval> components) {
        raw_ = std::move(components);
        normalize();
    }
    static BasicIntervalSet closed(const Num& lo, const Num& hi) {
        return BasicIntervalSet({Interval{lo, hi, true, true}});
    }

    const std::vector<Interval>& components() const { return raw_; }
    bool empty() const { return raw_.empty(); }
    std::size_t size() const { return raw_.size(); }
    Num measure() const {
        Num total(0);
        for (auto& c : raw_) total = total + c.length();
        return total;
    }
    bool contains(const Num& x) const {
        for (auto& c : raw_)
            if (c.contains(x)) return true;
        return false;
    }

    BasicIntervalSet unite(const BasicIntervalSet& other) const;
    BasicIntervalSet intersect(const BasicIntervalSet& other) const;
    BasicIntervalSet complement_in_unit() const;
    // Closure of every component (interval sets stay finite unions, so this
    // is exact).
    BasicIntervalSet closure() const;

    bool operator==(const BasicIntervalSet& other) const {
        if (raw_.size() != other.raw_.size()) return false;
        for (std::size_t i = 0; i < raw_.size(); ++i) {
            const auto& a = raw_[i];
            const auto& b = other.raw_[i];
            if (!(a.lo == b.lo) || !(a.hi == b.hi) || a.lo_closed != b.lo_closed ||
                a.hi_closed != b.hi_closed)
                return false;
        }
        return true;
    }

private:
    void normalize();
    std::vector<Interval> raw_;
};

using IntervalSet = BasicIntervalSet<Rational>;
using FloatIntervalSet = BasicIntervalSet<double>;

FloatIntervalSet to_float(const IntervalSet& s);

// Ordered cover of [0,1]: intervals [a_i, a_{i+1}) with the last one closed.
template <class Num>
class BasicPartition {
public:
    // cuts must start at 0, end at 1, strictly increasing.
    explicit BasicPartition(std::vector<Num> cuts);
    static BasicPartition whole() { return BasicPartition({Num(0), Num(1)}); }

    std::size_t interval_count() const { return cuts_.size() - 1; }
    const std::vector<Num>& cuts() const { return cuts_; }
    BasicInterval<Num> interval(std::size_t i) const {
        const bool last = i + 2 == cuts_.size();
        return {cuts_[i], cuts_[i + 1], true, last};
    }

private:
    std::vector<Num> cuts_;
};

using Partition = BasicPartition<Rational>;
using FloatPartition = BasicPartition<double>;

enum class CutRule {
    gap_midpoint,         // robust default
    set_left_endpoint,    // the y_x construction: cut at the next set's own left endpoint
};

// Splits [0,1] into finitely many intervals so that each one meets at most
// one of the two sets. Requires disjoint closures and positive-length
// components; rejects overlap with a witness point in the message.
template <class Num>
BasicPartition<Num> separate_pair(const BasicIntervalSet<Num>& p1,
                                  const BasicIntervalSet<Num>& p2,
                                  CutRule rule = CutRule::gap_midpoint);

// Exact preimages (u')^{-1}([k/n, (k+1)/n)) of a step function.
std::map<std::int64_t, IntervalSet> level_sets(const StepFunction& uprime, int n);

// Closed subset P of C with measure(C \ P) <= delta; every component of P is
// closed with positive length, and components of distinct inputs that only
// touched become strictly separated.
IntervalSet inner_core(const IntervalSet& c, const Rational& delta);

struct LevelPartitionReport {
    Rational p_measure;
    Rational measure_required;   // 1 - epsilon
    bool measure_ok = false;
    bool cover_ok = false;
    Rational max_diam;
    bool diam_ok = false;
    int n_levels = 0;            // the 1/n grid used on derivative values
    std::int64_t level_min = 0, level_max = 0;
    std::size_t interval_count = 0;
    bool all_ok() const { return measure_ok && cover_ok && diam_ok; }
};

struct LevelPartitionResult {
    IntervalSet p_eps;
    Partition partition;
    LevelPartitionReport report;
    std::map<std::int64_t, IntervalSet> cores;
};

// The full appendix construction: level sets, inner cores, pair separations
// over (G_m, F_m), endpoint collection, and an independent re-check of the
// three lemma conditions by direct set algebra.
LevelPartitionResult level_set_partition(const StepFunction& uprime, const Rational& epsilon,
                                         CutRule rule = CutRule::gap_midpoint);

// First `depth` components of the dyadic set P_eps together with the exact
// alternating +-1 derivative whose continuity set it is. epsilon must lie in
// (0, 1/4). Truncated measure is (1-3 eps)(1 - 2^-depth) exactly.
struct CounterexampleSet {
    IntervalSet p;
    StepFunction uprime;
    Rational full_measure;        // 1 - 3 eps
    Rational truncated_measure;
};

CounterexampleSet counterexample_set(const Rational& epsilon, int depth);

// Minimum N such that some N-interval partition gives each interval a single
// u' value on P: the number of maximal constant runs across components in
// spatial order. Requires u' constant on every component.
int min_separating_size(const StepFunction& uprime, const IntervalSet& p);

}  // namespace lavlab
