#pragma once

#include <memory>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ffm/chargroup.hpp"
#include "ffm/lfunc.hpp"

namespace ffm {

constexpr int kLPolyCacheVersion = 1;

nlohmann::json family_to_json(const PrimitiveFamily& family, int probe_degrees);
/// Throws std::runtime_error when the entry does not describe `group`'s
/// primitive characters.
PrimitiveFamily family_from_json(const nlohmann::json& j, std::shared_ptr<const UnitGroup> group, int probe_degrees);

/// Per-modulus JSON cache of unit groups and primitive L-polynomials.
/// An empty directory disables caching. Unreadable or stale entries are
/// rebuilt and overwritten.
class Cache {
  public:
    explicit Cache(std::string dir = {});

    bool enabled() const noexcept { return !dir_.empty(); }
    const std::string& dir() const noexcept { return dir_; }

    std::shared_ptr<const UnitGroup> unit_group(const Modulus& m, bool* hit = nullptr) const;
    PrimitiveFamily family(std::shared_ptr<const UnitGroup> group, int probe_degrees, bool* hit = nullptr) const;

    std::string unit_group_path(const Modulus& m) const;
    std::string family_path(const Modulus& m) const;

  private:
    std::string dir_;
};

}  // namespace ffm
