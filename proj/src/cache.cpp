#include "ffm/cache.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ffm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json complex_list(const std::vector<cplx>& v) {
    json out = json::array();
    for (const auto& c : v) out.push_back({c.real(), c.imag()});
    return out;
}

std::vector<cplx> read_complex_list(const json& j) {
    std::vector<cplx> out;
    for (const auto& pair : j) out.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    return out;
}

std::string stem(const Modulus& m) {
    return "q" + std::to_string(m.field().q()) + "-d" + std::to_string(m.degree()) + "-" +
           std::to_string(m.poly().code());
}

bool read_json(const std::string& path, json& out) {
    std::ifstream in(path);
    if (!in) return false;
    try {
        out = json::parse(in);
    } catch (const json::exception&) {
        return false;
    }
    return true;
}

void write_json(const std::string& path, const json& j) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write cache file " + tmp);
        out << j.dump() << '\n';
    }
    fs::rename(tmp, path);
}

}  // namespace

json family_to_json(const PrimitiveFamily& family, int probe_degrees) {
    json j;
    j["version"] = kLPolyCacheVersion;
    j["q"] = family.modulus().field().q();
    j["modulus"] = to_string(family.modulus().poly());
    j["probe"] = probe_degrees;
    json chars = json::array();
    for (const auto& L : family.lpolys) {
        chars.push_back({{"index", L.char_index}, {"coeffs", complex_list(L.coeffs)}, {"probe", complex_list(L.probe)}});
    }
    j["characters"] = chars;
    return j;
}

PrimitiveFamily family_from_json(const json& j, std::shared_ptr<const UnitGroup> group, int probe_degrees) {
    const Modulus& m = group->modulus();
    if (j.at("version").get<int>() != kLPolyCacheVersion) throw std::runtime_error("L-polynomial cache version mismatch");
    if (j.at("q").get<std::uint32_t>() != m.field().q() ||
        parse_poly(m.field(), j.at("modulus").get<std::string>()) != m.poly()) {
        throw std::runtime_error("L-polynomial cache belongs to another modulus");
    }
    if (j.at("probe").get<int>() != probe_degrees) throw std::runtime_error("L-polynomial cache has other probe depth");

    PrimitiveFamily fam;
    fam.group = group;
    const auto& entries = j.at("characters");
    std::size_t next = 0;
    for (auto& chi : all_characters(group)) {
        if (!chi.primitive()) continue;
        if (next >= entries.size()) throw std::runtime_error("L-polynomial cache is missing characters");
        const auto& e = entries.at(next++);
        if (e.at("index").get<std::uint64_t>() != chi.index()) throw std::runtime_error("L-polynomial cache index mismatch");
        LPolynomial L;
        L.char_index = chi.index();
        L.q = m.field().q();
        L.coeffs = read_complex_list(e.at("coeffs"));
        L.probe = read_complex_list(e.at("probe"));
        if (static_cast<int>(L.coeffs.size()) != m.degree() || static_cast<int>(L.probe.size()) != probe_degrees) {
            throw std::runtime_error("L-polynomial cache entry has the wrong length");
        }
        fam.lpolys.push_back(std::move(L));
        fam.characters.push_back(std::move(chi));
    }
    if (next != entries.size()) throw std::runtime_error("L-polynomial cache has extra characters");
    return fam;
}

Cache::Cache(std::string dir) : dir_(std::move(dir)) {
    if (enabled()) fs::create_directories(dir_);
}

std::string Cache::unit_group_path(const Modulus& m) const { return (fs::path(dir_) / ("unitgroup-" + stem(m) + ".json")).string(); }

std::string Cache::family_path(const Modulus& m) const { return (fs::path(dir_) / ("lpoly-" + stem(m) + ".json")).string(); }

std::shared_ptr<const UnitGroup> Cache::unit_group(const Modulus& m, bool* hit) const {
    if (hit) *hit = false;
    if (enabled()) {
        json j;
        if (read_json(unit_group_path(m), j)) {
            try {
                auto g = std::make_shared<const UnitGroup>(unit_group_from_json(j, m));
                if (hit) *hit = true;
                return g;
            } catch (const std::exception&) {
                // stale or corrupt: rebuild below
            }
        }
    }
    auto g = std::make_shared<const UnitGroup>(ffm::unit_group(m));
    if (enabled()) write_json(unit_group_path(m), unit_group_to_json(*g));
    return g;
}

PrimitiveFamily Cache::family(std::shared_ptr<const UnitGroup> group, int probe_degrees, bool* hit) const {
    if (hit) *hit = false;
    if (enabled()) {
        json j;
        if (read_json(family_path(group->modulus()), j)) {
            try {
                auto fam = family_from_json(j, group, probe_degrees);
                if (hit) *hit = true;
                return fam;
            } catch (const std::exception&) {
            }
        }
    }
    auto fam = primitive_family(group, probe_degrees);
    if (enabled()) write_json(family_path(group->modulus()), family_to_json(fam, probe_degrees));
    return fam;
}

}  // namespace ffm
