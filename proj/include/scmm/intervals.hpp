#pragma once

#include <limits>
#include <string>
#include <vector>

namespace scmm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Finite union of closed, pairwise disjoint intervals, kept sorted.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> intervals);

  static IntervalSet real_line() { return IntervalSet({{-kInf, kInf}}); }

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  std::size_t size() const { return intervals_.size(); }
  const Interval& operator[](std::size_t i) const { return intervals_[i]; }

  bool contains(double x) const;
  bool contains_interior(double x) const;
  bool bounded() const;
  double inf() const;
  double sup() const;

  // All finite endpoints, ascending.
  std::vector<double> finite_endpoints() const;

  IntervalSet negated() const;
  std::string to_string() const;

 private:
  std::vector<Interval> intervals_;
};

}  // namespace scmm
