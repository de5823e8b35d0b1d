#include "scmm/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scmm/errors.hpp"

namespace scmm {

IntervalSet::IntervalSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  std::sort(intervals_.begin(), intervals_.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const Interval& iv = intervals_[i];
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || !(iv.lo < iv.hi))
      throw ValidationError("invariant violation: interval [" + std::to_string(iv.lo) + ", " +
                            std::to_string(iv.hi) + "] is empty or degenerate");
    if (iv.hi == -kInf || iv.lo == kInf)
      throw ValidationError("invariant violation: interval endpoint order");
    if (i > 0 && !(intervals_[i - 1].hi < iv.lo))
      throw ValidationError("invariant violation: intervals overlap or touch");
  }
}

bool IntervalSet::contains(double x) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [x](const Interval& iv) { return iv.contains(x); });
}

bool IntervalSet::contains_interior(double x) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [x](const Interval& iv) { return iv.lo < x && x < iv.hi; });
}

bool IntervalSet::bounded() const {
  return !empty() && std::isfinite(inf()) && std::isfinite(sup());
}

double IntervalSet::inf() const { return empty() ? kInf : intervals_.front().lo; }
double IntervalSet::sup() const { return empty() ? -kInf : intervals_.back().hi; }

std::vector<double> IntervalSet::finite_endpoints() const {
  std::vector<double> out;
  for (const auto& iv : intervals_) {
    if (std::isfinite(iv.lo)) out.push_back(iv.lo);
    if (std::isfinite(iv.hi)) out.push_back(iv.hi);
  }
  return out;
}

IntervalSet IntervalSet::negated() const {
  std::vector<Interval> out;
  for (const auto& iv : intervals_) out.push_back({-iv.hi, -iv.lo});
  return IntervalSet(std::move(out));
}

std::string IntervalSet::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (i) os << " U ";
    os << '[' << intervals_[i].lo << ", " << intervals_[i].hi << ']';
  }
  if (intervals_.empty()) os << "{}";
  return os.str();
}

}  // namespace scmm
