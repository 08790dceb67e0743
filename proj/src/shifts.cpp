#include "ffm/shifts.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ffm/errors.hpp"

namespace ffm {

double theta_bar(double theta) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(std::fabs(theta), two_pi);
    return std::min(r, two_pi - r);
}

ShiftSpec::ShiftSpec(std::vector<Shift> pairs) : pairs_(std::move(pairs)) {
    if (pairs_.size() < 2 || pairs_.size() % 2 != 0) {
        throw DomainError("a shift spec needs an even number (>= 2) of pairs");
    }
    for (const auto& p : pairs_) {
        if (!(p.a > 0.0) || !std::isfinite(p.a)) throw DomainError("shift exponents must be positive");
        if (!std::isfinite(p.t)) throw DomainError("shifts must be finite");
    }
}

namespace {
std::vector<Shift> zip(std::span<const double> a, std::span<const double> t) {
    if (a.size() != t.size()) throw DomainError("exponent and shift lists differ in length");
    std::vector<Shift> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back({a[i], t[i]});
    return out;
}
}  // namespace

ShiftSpec::ShiftSpec(std::span<const double> a, std::span<const double> t) : ShiftSpec(zip(a, t)) {}

double ShiftSpec::exponent_sum() const noexcept {
    double s = 0.0;
    for (const auto& p : pairs_) s += p.a;
    return s;
}

double ShiftSpec::exponent_square_sum() const noexcept {
    double s = 0.0;
    for (const auto& p : pairs_) s += p.a * p.a;
    return s;
}

ShiftSpec ShiftSpec::negated() const {
    auto out = pairs_;
    for (auto& p : out) p.t = -p.t;
    return ShiftSpec(std::move(out));
}

ShiftSpec ShiftSpec::translated(double dt) const {
    auto out = pairs_;
    for (auto& p : out) p.t += dt;
    return ShiftSpec(std::move(out));
}

}  // namespace ffm
