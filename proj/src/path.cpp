#include "interlab/path.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <ostream>
#include <utility>

#include "interlab/error.hpp"

namespace interlab {

namespace {

void write_double(std::ostream& os, double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  os.write(buf, r.ptr - buf);
}

}  // namespace

CadlagPath::CadlagPath(double initial_value, double horizon)
    : initial_(initial_value), horizon_(horizon) {
  require(std::isfinite(initial_value), "CadlagPath: initial value must be finite");
  require(horizon >= 0.0 && std::isfinite(horizon), "CadlagPath: horizon must be nonnegative");
}

CadlagPath::CadlagPath(double initial_value, double horizon,
                       std::vector<double> jump_times, std::vector<double> jump_values)
    : CadlagPath(initial_value, horizon) {
  require(jump_times.size() == jump_values.size(),
          "CadlagPath: jump time/value lists must have equal length");
  times_.reserve(jump_times.size());
  values_.reserve(jump_values.size());
  for (std::size_t i = 0; i < jump_times.size(); ++i) {
    append_jump(jump_times[i], jump_values[i]);
  }
}

void CadlagPath::append_jump(double time, double value) {
  double last = times_.empty() ? 0.0 : times_.back();
  require(std::isfinite(time) && time > last,
          "CadlagPath: jump times must be strictly increasing and positive");
  require(time <= horizon_, "CadlagPath: jump time beyond horizon");
  require(std::isfinite(value) && value != final_value(),
          "CadlagPath: jump must change the value");
  times_.push_back(time);
  values_.push_back(value);
}

double CadlagPath::value_at(double t) const {
  require(t >= 0.0 && t <= horizon_, "CadlagPath: query time outside [0, horizon]");
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return initial_;
  return values_[std::size_t(it - times_.begin()) - 1];
}

double CadlagPath::left_limit(double t) const {
  require(t >= 0.0 && t <= horizon_, "CadlagPath: query time outside [0, horizon]");
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return initial_;
  return values_[std::size_t(it - times_.begin()) - 1];
}

void CadlagPath::write_csv(std::ostream& os) const {
  os << "time,value\n";
  write_double(os, 0.0);
  os << ',';
  write_double(os, initial_);
  os << '\n';
  for (std::size_t i = 0; i < times_.size(); ++i) {
    write_double(os, times_[i]);
    os << ',';
    write_double(os, values_[i]);
    os << '\n';
  }
}

double sup_distance(const CadlagPath& a, const CadlagPath& b, double T) {
  require(T >= 0.0, "sup_distance: T must be nonnegative");
  require(a.horizon() >= T && b.horizon() >= T,
          "sup_distance: both paths must be defined on [0, T]");
  // Piecewise-constant paths: the sup is attained at 0 or at a jump time.
  auto ta = a.jump_times(), tb = b.jump_times();
  auto va = a.jump_values(), vb = b.jump_values();
  double best = std::fabs(a.initial_value() - b.initial_value());
  double ca = a.initial_value(), cb = b.initial_value();
  std::size_t ia = 0, ib = 0;
  for (;;) {
    double na = ia < ta.size() ? ta[ia] : std::numeric_limits<double>::infinity();
    double nb = ib < tb.size() ? tb[ib] : std::numeric_limits<double>::infinity();
    double t = std::min(na, nb);
    if (t > T || (ia >= ta.size() && ib >= tb.size())) break;
    if (na <= t) ca = va[ia++];
    if (nb <= t) cb = vb[ib++];
    best = std::max(best, std::fabs(ca - cb));
  }
  return best;
}

double sup_distance(const CadlagPath& a, const CadlagPath& b) {
  require(a.horizon() == b.horizon(), "sup_distance: mismatched horizons");
  return sup_distance(a, b, a.horizon());
}

double oscillation_modulus(const CadlagPath& path, double T, double delta) {
  require(T >= 0.0 && T <= path.horizon(), "oscillation_modulus: T outside [0, horizon]");
  require(delta > 0.0 && delta <= T, "oscillation_modulus: delta must lie in (0, T]");
  auto times = path.jump_times();
  auto values = path.jump_values();
  // Segment k holds value v_k starting at u_k (u_0 = 0).  Two segments i < j
  // contain points within delta of each other iff u_j - u_{i+1} < delta, so a
  // sliding window over segments with monotonic min/max deques gives the sup.
  std::size_t m = std::size_t(std::upper_bound(times.begin(), times.end(), T) - times.begin());
  double best = 0.0;
  std::deque<std::size_t> maxdq, mindq;
  auto start_of = [&](std::size_t k) { return k == 0 ? 0.0 : times[k - 1]; };
  auto value_of = [&](std::size_t k) { return k == 0 ? path.initial_value() : values[k - 1]; };
  std::size_t lo = 0;
  for (std::size_t j = 0; j <= m; ++j) {
    double uj = start_of(j);
    // Segment i ends at start_of(i + 1); drop segments too far in the past.
    while (lo < j && start_of(lo + 1) <= uj - delta) {
      if (!maxdq.empty() && maxdq.front() == lo) maxdq.pop_front();
      if (!mindq.empty() && mindq.front() == lo) mindq.pop_front();
      ++lo;
    }
    double vj = value_of(j);
    while (!maxdq.empty() && value_of(maxdq.back()) <= vj) maxdq.pop_back();
    maxdq.push_back(j);
    while (!mindq.empty() && value_of(mindq.back()) >= vj) mindq.pop_back();
    mindq.push_back(j);
    best = std::max(best, value_of(maxdq.front()) - value_of(mindq.front()));
  }
  return best;
}

}  // namespace interlab
