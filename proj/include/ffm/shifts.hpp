#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ffm {

/// Distance from theta to the nearest multiple of 2 pi; lies in [0, pi].
double theta_bar(double theta) noexcept;

struct Shift {
    double a;  // exponent, > 0
    double t;  // shift on the critical line
};

/// 2k (exponent, shift) pairs with 2k even and >= 2, every exponent positive.
class ShiftSpec {
  public:
    explicit ShiftSpec(std::vector<Shift> pairs);
    ShiftSpec(std::span<const double> a, std::span<const double> t);

    std::span<const Shift> pairs() const noexcept { return pairs_; }
    std::size_t size() const noexcept { return pairs_.size(); }
    double exponent_sum() const noexcept;
    double exponent_square_sum() const noexcept;

    /// Every t_j replaced by -t_j.
    ShiftSpec negated() const;
    /// Every t_j moved by the same amount.
    ShiftSpec translated(double dt) const;

    friend bool operator==(const ShiftSpec&, const ShiftSpec&) = default;

  private:
    std::vector<Shift> pairs_;
};

inline bool operator==(const Shift& x, const Shift& y) { return x.a == y.a && x.t == y.t; }

}  // namespace ffm
