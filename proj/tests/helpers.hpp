#pragma once

#include <complex>
#include <memory>
#include <string>

#include "ffm/chargroup.hpp"
#include "ffm/ffpoly.hpp"

namespace ffm::test {

inline FqPoly P(std::uint32_t q, const std::string& s) { return parse_poly(FieldSpec(q), s); }

inline std::shared_ptr<const UnitGroup> group_of(std::uint32_t q, const std::string& Q) {
    return std::make_shared<const UnitGroup>(unit_group(factor_modulus(P(q, Q))));
}

/// The character mod T^2 over F_3 sending T+2 to exp(2 pi i k / 6).
inline DirichletChar t_squared_char(const std::shared_ptr<const UnitGroup>& g, int k) {
    const auto target = std::polar(1.0, 2.0 * 3.14159265358979323846 * k / 6.0);
    for (auto& chi : all_characters(g)) {
        if (std::abs(char_eval(chi, P(3, "T + 2")) - target) < 1e-12) return chi;
    }
    throw std::logic_error("no such character");
}

}  // namespace ffm::test
