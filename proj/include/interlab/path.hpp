#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace interlab {

// Piecewise-constant right-continuous path on [0, horizon].  Jumps are actual
// value changes at strictly increasing times in (0, horizon]; between jumps the
// path holds its value, and the left limit at a jump time is the value before
// the jump.
class CadlagPath {
 public:
  CadlagPath(double initial_value, double horizon);
  CadlagPath(double initial_value, double horizon,
             std::vector<double> jump_times, std::vector<double> jump_values);

  // Jump time must exceed the previous one (and 0), stay <= horizon, and the
  // value must differ from the current final value.
  void append_jump(double time, double value);

  double initial_value() const { return initial_; }
  double horizon() const { return horizon_; }
  std::size_t jump_count() const { return times_.size(); }
  std::span<const double> jump_times() const { return times_; }
  std::span<const double> jump_values() const { return values_; }
  double final_value() const { return values_.empty() ? initial_ : values_.back(); }

  double value_at(double t) const;
  double left_limit(double t) const;

  // Rows "time,value" with a header, first data row (0, initial_value).
  void write_csv(std::ostream& os) const;

 private:
  double initial_;
  double horizon_;
  std::vector<double> times_;
  std::vector<double> values_;
};

// sup over t in [0, T] of |a(t) - b(t)|.  Both paths must cover [0, T].
double sup_distance(const CadlagPath& a, const CadlagPath& b, double T);

// Convenience overload over the common horizon; horizons must agree exactly.
double sup_distance(const CadlagPath& a, const CadlagPath& b);

// sup |f(t) - f(s)| over s, t in [0, T] with |t - s| <= delta, requiring
// 0 < delta <= T <= horizon.
double oscillation_modulus(const CadlagPath& path, double T, double delta);

}  // namespace interlab
