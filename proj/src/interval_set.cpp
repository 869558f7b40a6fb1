#include "lavlab/interval_set.hpp"

#include <algorithm>
#include <sstream>

namespace lavlab {

template <class Num>
std::string BasicInterval<Num>::to_string() const {
    std::ostringstream os;
    os << (lo_closed ? '[' : '(');
    if constexpr (std::is_same_v<Num, Rational>) os << lo.to_string() << ", " << hi.to_string();
    else os << lo << ", " << hi;
    os << (hi_closed ? ']' : ')');
    return os.str();
}

namespace {

template <class Num>
bool before(const BasicInterval<Num>& a, const BasicInterval<Num>& b) {
    if (a.lo < b.lo) return true;
    if (b.lo < a.lo) return false;
    return a.lo_closed && !b.lo_closed;
}

// True when cur and next overlap or touch in a way whose union is an interval.
template <class Num>
bool mergeable(const BasicInterval<Num>& cur, const BasicInterval<Num>& next) {
    if (next.lo < cur.hi) return true;
    if (cur.hi == next.lo) return cur.hi_closed || next.lo_closed;
    return false;
}

}  // namespace

template <class Num>
void BasicIntervalSet<Num>::normalize() {
    std::vector<Interval> in;
    in.reserve(raw_.size());
    for (auto& c : raw_)
        if (!c.empty()) in.push_back(c);
    std::sort(in.begin(), in.end(), [](const Interval& a, const Interval& b) { return before(a, b); });
    raw_.clear();
    for (auto& c : in) {
        if (!raw_.empty() && mergeable(raw_.back(), c)) {
            Interval& cur = raw_.back();
            if (cur.hi < c.hi) {
                cur.hi = c.hi;
                cur.hi_closed = c.hi_closed;
            } else if (cur.hi == c.hi) {
                cur.hi_closed = cur.hi_closed || c.hi_closed;
            }
        } else {
            raw_.push_back(c);
        }
    }
}

template <class Num>
BasicIntervalSet<Num> BasicIntervalSet<Num>::unite(const BasicIntervalSet& other) const {
    std::vector<Interval> all = raw_;
    all.insert(all.end(), other.raw_.begin(), other.raw_.end());
    return BasicIntervalSet(std::move(all));
}

template <class Num>
BasicIntervalSet<Num> BasicIntervalSet<Num>::intersect(const BasicIntervalSet& other) const {
    std::vector<Interval> out;
    for (auto& a : raw_) {
        for (auto& b : other.raw_) {
            if (b.hi < a.lo || a.hi < b.lo) continue;
            Interval r;
            if (a.lo < b.lo) { r.lo = b.lo; r.lo_closed = b.lo_closed; }
            else if (b.lo < a.lo) { r.lo = a.lo; r.lo_closed = a.lo_closed; }
            else { r.lo = a.lo; r.lo_closed = a.lo_closed && b.lo_closed; }
            if (a.hi < b.hi) { r.hi = a.hi; r.hi_closed = a.hi_closed; }
            else if (b.hi < a.hi) { r.hi = b.hi; r.hi_closed = b.hi_closed; }
            else { r.hi = a.hi; r.hi_closed = a.hi_closed && b.hi_closed; }
            if (!r.empty()) out.push_back(r);
        }
    }
    return BasicIntervalSet(std::move(out));
}

template <class Num>
BasicIntervalSet<Num> BasicIntervalSet<Num>::complement_in_unit() const {
    std::vector<Interval> out;
    Num pos(0);
    bool pos_open = false;  // true when `pos` itself belongs to this set
    for (auto& c : raw_) {
        if (c.hi < Num(0) || Num(1) < c.lo) continue;
        Interval gap{pos, c.lo, !pos_open, !c.lo_closed};
        if (!gap.empty() && Num(0) <= gap.lo) out.push_back(gap);
        if (pos < c.hi || (pos == c.hi && c.hi_closed)) {
            pos = c.hi;
            pos_open = c.hi_closed;
        }
    }
    Interval tail{pos, Num(1), !pos_open, true};
    if (!tail.empty()) out.push_back(tail);
    return BasicIntervalSet(std::move(out));
}

template <class Num>
BasicIntervalSet<Num> BasicIntervalSet<Num>::closure() const {
    std::vector<Interval> out = raw_;
    for (auto& c : out) {
        c.lo_closed = true;
        c.hi_closed = true;
    }
    return BasicIntervalSet(std::move(out));
}

template <class Num>
BasicPartition<Num>::BasicPartition(std::vector<Num> cuts) : cuts_(std::move(cuts)) {
    if (cuts_.size() < 2 || !(cuts_.front() == Num(0)) || !(cuts_.back() == Num(1)))
        throw std::invalid_argument("Partition: cuts must run from 0 to 1");
    for (std::size_t i = 0; i + 1 < cuts_.size(); ++i)
        if (!(cuts_[i] < cuts_[i + 1]))
            throw std::invalid_argument("Partition: cuts must increase strictly");
}

namespace {

template <class Num>
struct Tagged {
    BasicInterval<Num> iv;
    int owner;
};

}  // namespace

template <class Num>
BasicPartition<Num> separate_pair(const BasicIntervalSet<Num>& p1,
                                  const BasicIntervalSet<Num>& p2, CutRule rule) {
    for (auto& c : p1.components())
        if (c.degenerate()) throw std::invalid_argument("separate_pair: degenerate component in P1");
    for (auto& c : p2.components())
        if (c.degenerate()) throw std::invalid_argument("separate_pair: degenerate component in P2");
    auto overlap = p1.closure().intersect(p2.closure());
    if (!overlap.empty()) {
        throw std::invalid_argument("separate_pair: closures intersect, witness point " +
                                    overlap.components().front().to_string());
    }
    if (p1.empty() || p2.empty()) return BasicPartition<Num>::whole();

    std::vector<Tagged<Num>> merged;
    for (auto& c : p1.components()) merged.push_back({c, 1});
    for (auto& c : p2.components()) merged.push_back({c, 2});
    std::sort(merged.begin(), merged.end(),
              [](const Tagged<Num>& a, const Tagged<Num>& b) { return a.iv.lo < b.iv.lo; });

    std::vector<Num> cuts{Num(0)};
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        if (merged[i].owner == merged[i + 1].owner) continue;
        const Num cut = rule == CutRule::gap_midpoint
                            ? (merged[i].iv.hi + merged[i + 1].iv.lo) / Num(2)
                            : merged[i + 1].iv.lo;
        if (cut > cuts.back() && cut < Num(1)) cuts.push_back(cut);
    }
    cuts.push_back(Num(1));
    return BasicPartition<Num>(std::move(cuts));
}

template struct BasicInterval<Rational>;
template struct BasicInterval<double>;
template class BasicIntervalSet<Rational>;
template class BasicIntervalSet<double>;
template class BasicPartition<Rational>;
template class BasicPartition<double>;
template Partition separate_pair<Rational>(const IntervalSet&, const IntervalSet&, CutRule);
template FloatPartition separate_pair<double>(const FloatIntervalSet&, const FloatIntervalSet&, CutRule);

FloatIntervalSet to_float(const IntervalSet& s) {
    std::vector<BasicInterval<double>> out;
    for (auto& c : s.components())
        out.push_back({c.lo.to_double(), c.hi.to_double(), c.lo_closed, c.hi_closed});
    return FloatIntervalSet(std::move(out));
}

std::map<std::int64_t, IntervalSet> level_sets(const StepFunction& uprime, int n) {
    if (n < 1) throw std::invalid_argument("level_sets: n >= 1");
    std::map<std::int64_t, std::vector<BasicInterval<Rational>>> cells;
    const auto& bp = uprime.breakpoints();
    const auto& vals = uprime.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const std::int64_t k = (vals[i] * Rational(n)).floor();
        const bool last = i + 1 == vals.size();
        cells[k].push_back({bp[i], bp[i + 1], true, last});
    }
    std::map<std::int64_t, IntervalSet> out;
    for (auto& [k, list] : cells) out.emplace(k, IntervalSet(std::move(list)));
    return out;
}

IntervalSet inner_core(const IntervalSet& c, const Rational& delta) {
    if (!(Rational(0) < delta)) throw std::invalid_argument("inner_core: delta > 0");
    if (c.empty()) return {};
    const Rational count(static_cast<std::int64_t>(c.size()));
    const Rational drop_below = delta / (Rational(2) * count);
    std::vector<BasicInterval<Rational>> out;
    for (auto& comp : c.components()) {
        const Rational len = comp.length();
        if (len < drop_below) continue;
        const Rational shrink = Rational::min(drop_below, len / Rational(4));
        out.push_back({comp.lo + shrink, comp.hi - shrink, true, true});
    }
    return IntervalSet(std::move(out));
}

LevelPartitionResult level_set_partition(const StepFunction& uprime, const Rational& epsilon,
                                         CutRule rule) {
    if (!(Rational(0) < epsilon) || !(epsilon < Rational(1)))
        throw std::invalid_argument("level_set_partition: epsilon in (0,1)");
    // Smallest n with 1/n < epsilon.
    std::int64_t n = (Rational(1) / epsilon).floor() + 1;
    auto levels = level_sets(uprime, static_cast<int>(n));

    std::int64_t k_min = levels.begin()->first;
    std::int64_t k_max = levels.rbegin()->first;
    // The value range of a step function is finite, so no level mass is ever
    // truncated; the whole shrink budget goes to the inner cores.
    std::int64_t m_cap = std::max<std::int64_t>(std::max(std::llabs(k_min), std::llabs(k_max)), 1);
    const Rational budget = epsilon / (Rational(4) * Rational(m_cap));

    std::map<std::int64_t, IntervalSet> cores;
    for (auto& [k, set] : levels) {
        auto core = inner_core(set.closure(), budget);
        if (!core.empty()) cores.emplace(k, std::move(core));
    }

    IntervalSet p_eps;
    for (auto& [k, core] : cores) p_eps = p_eps.unite(core);

    // Pair separations over (G_m, F_m); empty-sided pairs change nothing and
    // are skipped.
    std::vector<Rational> cut_points{Rational(0), Rational(1)};
    for (std::int64_t m = k_min; m < k_max; ++m) {
        IntervalSet f_m, g_m;
        for (auto& [k, core] : cores) {
            if (k <= m) f_m = f_m.unite(core);
            else g_m = g_m.unite(core);
        }
        if (f_m.empty() || g_m.empty()) continue;
        auto part = separate_pair(g_m, f_m, rule);
        for (auto& cutv : part.cuts()) cut_points.push_back(cutv);
    }
    std::sort(cut_points.begin(), cut_points.end());
    cut_points.erase(std::unique(cut_points.begin(), cut_points.end()), cut_points.end());
    Partition partition(std::move(cut_points));

    LevelPartitionReport rep;
    rep.n_levels = static_cast<int>(n);
    rep.level_min = k_min;
    rep.level_max = k_max;
    rep.interval_count = partition.interval_count();
    rep.p_measure = p_eps.measure();
    rep.measure_required = Rational(1) - epsilon;
    rep.measure_ok = rep.p_measure > rep.measure_required;

    // Cover check by direct algebra: the union of the partition intervals
    // must be exactly [0,1].
    IntervalSet cover;
    for (std::size_t i = 0; i < partition.interval_count(); ++i)
        cover = cover.unite(IntervalSet({partition.interval(i)}));
    rep.cover_ok = cover == IntervalSet::closed(Rational(0), Rational(1));

    // Diameter check: values of u' on B_i ∩ P_eps, computed exactly from the
    // step-function cells, must span at most epsilon.
    rep.max_diam = Rational(0);
    rep.diam_ok = true;
    const auto& bp = uprime.breakpoints();
    const auto& vals = uprime.values();
    for (std::size_t i = 0; i < partition.interval_count(); ++i) {
        IntervalSet bi({partition.interval(i)});
        auto hit = bi.intersect(p_eps);
        if (hit.empty()) continue;
        bool any = false;
        Rational vmin(0), vmax(0);
        for (std::size_t cell = 0; cell < vals.size(); ++cell) {
            const bool last = cell + 1 == vals.size();
            IntervalSet cell_set({BasicInterval<Rational>{bp[cell], bp[cell + 1], true, last}});
            if (hit.intersect(cell_set).empty()) continue;
            if (!any) { vmin = vmax = vals[cell]; any = true; }
            else {
                vmin = Rational::min(vmin, vals[cell]);
                vmax = Rational::max(vmax, vals[cell]);
            }
        }
        if (any) {
            const Rational diam = vmax - vmin;
            rep.max_diam = Rational::max(rep.max_diam, diam);
            if (diam > epsilon) rep.diam_ok = false;
        }
    }
    return {std::move(p_eps), std::move(partition), rep, std::move(cores)};
}

CounterexampleSet counterexample_set(const Rational& epsilon, int depth) {
    if (!(Rational(0) < epsilon) || !(epsilon < Rational(1, 4)))
        throw std::invalid_argument("counterexample_set: epsilon must lie in (0, 1/4)");
    if (depth < 1) throw std::invalid_argument("counterexample_set: depth >= 1");
    if (depth > 28) throw std::invalid_argument("counterexample_set: depth too large for exact arithmetic");

    std::vector<BasicInterval<Rational>> comps;
    for (int n = 1; n <= depth; ++n) {
        const Rational pow2n(std::int64_t(1) << n);
        const Rational lo = (Rational(1) + epsilon) / pow2n;
        const Rational hi = (Rational(1) - epsilon) / (pow2n / Rational(2));
        comps.push_back({lo, hi, true, true});
    }
    IntervalSet p(std::move(comps));

    // u' = -1 on the dyadic bands [2^-(2j+1), 2^-2j], +1 otherwise, truncated
    // below 2^-(2 depth + 1) where it is held at +1.
    std::vector<Rational> bp{Rational(0)};
    std::vector<Rational> vals;
    const int lowest = 2 * depth + 1;
    for (int e = lowest; e >= 1; --e) bp.push_back(Rational(1, std::int64_t(1) << e));
    bp.push_back(Rational(1));
    // Cell [2^-(e+1), 2^-e] has e even <=> inside a -1 band; the tail cell
    // below the truncation keeps +1, matching the "otherwise" branch.
    vals.push_back(Rational(1));
    for (int e = lowest; e >= 1; --e) vals.push_back((e - 1) % 2 == 0 ? Rational(-1) : Rational(1));
    StepFunction uprime(std::move(bp), std::move(vals));

    CounterexampleSet out{std::move(p), std::move(uprime), Rational(0), Rational(0)};
    out.full_measure = Rational(1) - Rational(3) * epsilon;
    const Rational tail = Rational(1, std::int64_t(1) << depth);
    out.truncated_measure = out.full_measure * (Rational(1) - tail);
    return out;
}

int min_separating_size(const StepFunction& uprime, const IntervalSet& p) {
    if (p.empty()) return 1;
    const auto& bp = uprime.breakpoints();
    const auto& vals = uprime.values();
    std::vector<Rational> comp_value;
    for (auto& comp : p.components()) {
        std::optional<Rational> value;
        for (std::size_t cell = 0; cell < vals.size(); ++cell) {
            const bool last = cell + 1 == vals.size();
            IntervalSet cell_set({BasicInterval<Rational>{bp[cell], bp[cell + 1], true, last}});
            auto hit = IntervalSet({comp}).intersect(cell_set);
            if (hit.empty()) continue;
            if (value && !(*value == vals[cell]))
                throw std::invalid_argument("min_separating_size: u' not constant on component " +
                                            comp.to_string());
            value = vals[cell];
        }
        comp_value.push_back(value.value_or(Rational(0)));
    }
    int runs = 1;
    for (std::size_t i = 1; i < comp_value.size(); ++i)
        if (!(comp_value[i] == comp_value[i - 1])) ++runs;
    return runs;
}

}  // namespace lavlab
