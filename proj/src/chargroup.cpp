#include "ffm/chargroup.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ffm/errors.hpp"

namespace ffm {

namespace {

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

FqPoly poly_pow(const FqPoly& f, int e) {
    FqPoly r = FqPoly::constant(f.field(), 1);
    for (int i = 0; i < e; ++i) r = r * f;
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Modulus

Modulus factor_modulus(const FqPoly& Q) {
    if (!Q.is_monic()) throw DomainError("modulus must be monic");
    if (Q.degree() < 2) throw DomainError("modulus must have degree >= 2");
    Modulus m(Q);
    m.norm_ = Q.norm();
    const FieldSpec F = Q.field();

    FqPoly rest = Q;
    for (int n = 1; 2 * n <= rest.degree(); ++n) {
        for (const auto& P : enumerate_irreducible(F, n)) {
            int e = 0;
            while (true) {
                auto [quo, rem] = poly_divmod(rest, P);
                if (!rem.is_zero()) break;
                rest = std::move(quo);
                ++e;
            }
            if (e > 0) m.factors_.push_back({P, e});
            if (2 * n > rest.degree()) break;
        }
    }
    // whatever is left has no factor of degree <= half its own, so is prime
    if (rest.degree() >= 1) m.factors_.push_back({rest, 1});
    std::sort(m.factors_.begin(), m.factors_.end(),
              [](const PrimePower& a, const PrimePower& b) { return a.prime < b.prime; });
    m.phi_ = 1;
    for (const auto& [P, e] : m.factors_) {
        const std::uint64_t np = P.norm();
        m.phi_ *= checked_pow(np, e) - checked_pow(np, e - 1);
    }
    return m;
}

std::uint64_t euler_phi(const Modulus& m) { return m.phi(); }

std::uint64_t primitive_count_formula(const Modulus& m) {
    std::uint64_t total = 1;
    for (const auto& [P, e] : m.factors()) {
        const std::uint64_t np = P.norm();
        std::uint64_t local = e == 1 ? np - 2 : checked_pow(np, e - 2) * (np - 1) * (np - 1);
        total *= local;
    }
    return total;
}

// ---------------------------------------------------------------------------
// ResidueRing

ResidueRing::ResidueRing(FqPoly modulus)
    : modulus_(std::move(modulus)), q_(modulus_.field().q()), degree_(modulus_.degree()) {
    if (!modulus_.is_monic() || degree_ < 1) throw DomainError("residue ring needs a monic modulus of degree >= 1");
    if (degree_ > 62) throw DomainError("modulus degree too large");
    size_ = checked_pow(q_, degree_);
    if (size_ == std::numeric_limits<std::uint64_t>::max()) throw DomainError("residue ring too large");
}

std::uint64_t ResidueRing::reduce(const FqPoly& f) const {
    if (!(f.field() == modulus_.field())) throw FieldMismatch();
    if (f.degree() < degree_) return f.code();
    return poly_mod(f, modulus_).code();
}

std::uint64_t ResidueRing::mul(std::uint64_t a, std::uint64_t b) const {
    std::array<std::uint64_t, 64> x{}, y{};
    std::array<std::uint64_t, 128> prod{};
    for (int i = 0; i < degree_; ++i) {
        x[static_cast<std::size_t>(i)] = a % q_;
        a /= q_;
        y[static_cast<std::size_t>(i)] = b % q_;
        b /= q_;
    }
    for (int i = 0; i < degree_; ++i) {
        if (x[static_cast<std::size_t>(i)] == 0) continue;
        for (int j = 0; j < degree_; ++j) {
            auto& s = prod[static_cast<std::size_t>(i + j)];
            s = (s + x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)]) % q_;
        }
    }
    // modulus is monic: T^d = -sum_{j<d} m_j T^j
    const auto mc = modulus_.coeffs();
    for (int k = 2 * degree_ - 2; k >= degree_; --k) {
        const std::uint64_t c = prod[static_cast<std::size_t>(k)];
        if (c == 0) continue;
        prod[static_cast<std::size_t>(k)] = 0;
        for (int j = 0; j < degree_; ++j) {
            auto& s = prod[static_cast<std::size_t>(k - degree_ + j)];
            s = (s + (q_ - c) * mc[static_cast<std::size_t>(j)]) % q_;
        }
    }
    std::uint64_t code = 0;
    for (int i = degree_ - 1; i >= 0; --i) code = code * q_ + prod[static_cast<std::size_t>(i)];
    return code;
}

std::uint64_t ResidueRing::pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = one();
    while (e > 0) {
        if (e & 1u) r = mul(r, a);
        e >>= 1;
        if (e > 0) a = mul(a, a);
    }
    return r;
}

bool ResidueRing::is_unit(std::uint64_t a) const {
    if (a == 0) return false;
    return poly_gcd(lift(a), modulus_).is_one();
}

// ---------------------------------------------------------------------------
// Abelian group structure

namespace {

struct BasisElement {
    std::uint64_t code;
    std::uint64_t order;
};

using IntMatrix = std::vector<std::vector<std::int64_t>>;

std::uint64_t element_order(const ResidueRing& ring, std::uint64_t g) {
    std::uint64_t n = 1;
    for (std::uint64_t x = g; x != ring.one(); x = ring.mul(x, g)) ++n;
    return n;
}

// Smith normal form of a square relation matrix. Returns the diagonal and W
// with W = V^{-1}, where D = U R V. New generators are h = W g (additively).
std::pair<std::vector<std::int64_t>, IntMatrix> smith_normal_form(IntMatrix R) {
    const std::size_t s = R.size();
    IntMatrix W(s, std::vector<std::int64_t>(s, 0));
    for (std::size_t i = 0; i < s; ++i) W[i][i] = 1;

    for (std::size_t t = 0; t < s; ++t) {
        while (true) {
            // pivot: smallest nonzero |entry| in the trailing block
            std::size_t pi = s, pj = s;
            for (std::size_t i = t; i < s; ++i) {
                for (std::size_t j = t; j < s; ++j) {
                    if (R[i][j] != 0 && (pi == s || std::llabs(R[i][j]) < std::llabs(R[pi][pj]))) {
                        pi = i;
                        pj = j;
                    }
                }
            }
            if (pi == s) throw std::logic_error("relation matrix is singular");
            std::swap(R[t], R[pi]);
            if (pj != t) {
                for (std::size_t i = 0; i < s; ++i) std::swap(R[i][t], R[i][pj]);
                std::swap(W[t], W[pj]);
            }

            bool clean = true;
            for (std::size_t i = t + 1; i < s; ++i) {
                const std::int64_t f = R[i][t] / R[t][t];
                if (f != 0) {
                    for (std::size_t j = t; j < s; ++j) R[i][j] -= f * R[t][j];
                }
                if (R[i][t] != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < s; ++j) {
                const std::int64_t f = R[t][j] / R[t][t];
                if (f != 0) {
                    for (std::size_t i = t; i < s; ++i) R[i][j] -= f * R[i][t];
                    // column op col_j -= f col_t  =>  W row_t += f row_j
                    for (std::size_t k = 0; k < s; ++k) W[t][k] += f * W[j][k];
                }
                if (R[t][j] != 0) clean = false;
            }
            if (!clean) continue;

            bool divides = true;
            for (std::size_t i = t + 1; i < s && divides; ++i) {
                for (std::size_t j = t + 1; j < s; ++j) {
                    if (R[i][j] % R[t][t] != 0) {
                        for (std::size_t k = t; k < s; ++k) R[t][k] += R[i][k];
                        divides = false;
                        break;
                    }
                }
            }
            if (divides) break;
        }
    }
    std::vector<std::int64_t> diag(s);
    for (std::size_t t = 0; t < s; ++t) diag[t] = std::llabs(R[t][t]);
    return {diag, W};
}

// Basis of the finite abelian group formed by `elements` (closed under the
// ring multiplication, sorted by code). Generators are picked greedily in code
// order, their relations recorded, and the relation matrix diagonalised.
std::vector<BasisElement> abelian_basis(const ResidueRing& ring, const std::vector<std::uint64_t>& elements) {
    // subgroup membership: code -> exponent vector in the current generators
    std::vector<std::int64_t> slot(ring.size(), -1);
    std::vector<std::vector<std::int64_t>> exps;
    std::vector<std::uint64_t> members;
    auto add_member = [&](std::uint64_t code, std::vector<std::int64_t> e) {
        slot[code] = static_cast<std::int64_t>(members.size());
        members.push_back(code);
        exps.push_back(std::move(e));
    };
    add_member(ring.one(), {});

    std::vector<std::uint64_t> gens;
    IntMatrix relations;
    for (std::uint64_t g : elements) {
        if (members.size() == elements.size()) break;
        if (slot[g] >= 0) continue;
        std::uint64_t n = 1;
        std::uint64_t x = g;
        while (slot[x] < 0) {
            x = ring.mul(x, g);
            ++n;
        }
        const std::size_t r = gens.size();
        std::vector<std::int64_t> rel(r + 1, 0);
        const auto& known = exps[static_cast<std::size_t>(slot[x])];
        for (std::size_t j = 0; j < known.size(); ++j) rel[j] = -known[j];
        rel[r] = static_cast<std::int64_t>(n);
        relations.push_back(std::move(rel));

        for (auto& e : exps) e.resize(r + 1, 0);
        const std::size_t old_size = members.size();
        std::uint64_t gi = g;
        for (std::uint64_t i = 1; i < n; ++i) {
            for (std::size_t h = 0; h < old_size; ++h) {
                auto e = exps[h];
                e[r] = static_cast<std::int64_t>(i);
                add_member(ring.mul(members[h], gi), std::move(e));
            }
            gi = ring.mul(gi, g);
        }
        gens.push_back(g);
    }
    if (members.size() != elements.size()) throw std::logic_error("subgroup enumeration is not closed");

    const std::size_t s = gens.size();
    for (auto& row : relations) row.resize(s, 0);
    auto [diag, W] = smith_normal_form(std::move(relations));

    std::vector<std::uint64_t> gen_orders(s);
    for (std::size_t j = 0; j < s; ++j) gen_orders[j] = element_order(ring, gens[j]);

    std::vector<BasisElement> basis;
    for (std::size_t i = 0; i < s; ++i) {
        if (diag[i] == 1) continue;
        std::uint64_t h = ring.one();
        for (std::size_t j = 0; j < s; ++j) {
            const auto ord = static_cast<std::int64_t>(gen_orders[j]);
            const std::int64_t e = ((W[i][j] % ord) + ord) % ord;
            h = ring.mul(h, ring.pow(gens[j], static_cast<std::uint64_t>(e)));
        }
        const auto d = static_cast<std::uint64_t>(diag[i]);
        if (element_order(ring, h) != d) throw std::logic_error("Smith basis element has the wrong order");
        basis.push_back({h, d});
    }
    return basis;
}

// First residue (in code order) generating (A/PA)^*.
std::uint64_t cyclic_generator_mod_prime(const ResidueRing& ring) {
    const std::uint64_t order = ring.size() - 1;
    const auto primes = prime_factors(order);
    for (std::uint64_t g = 1; g < ring.size(); ++g) {
        bool ok = true;
        for (auto l : primes) {
            if (ring.pow(g, order / l) == ring.one()) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    throw std::logic_error("no generator found for a prime residue field");
}

}  // namespace

// ---------------------------------------------------------------------------
// UnitGroup

UnitGroup unit_group(const Modulus& m) {
    UnitGroup G(m);
    const FieldSpec F = m.field();
    const FqPoly& Q = m.poly();
    const ResidueRing& global = G.ring_;

    for (const auto& [P, e] : m.factors()) {
        const FqPoly Pe = poly_pow(P, e);
        const ResidueRing local(Pe);
        const ResidueRing prime_ring(P);
        std::vector<BasisElement> local_basis;

        // cyclic part of order |P| - 1: a generator mod P raised to |P|^{e-1}
        // lands in the Teichmuller subgroup and keeps order |P| - 1.
        const std::uint64_t cyc = P.norm() - 1;
        if (cyc > 1) {
            const std::uint64_t g = cyclic_generator_mod_prime(prime_ring);
            const std::uint64_t lifted = local.pow(g, checked_pow(P.norm(), e - 1));
            local_basis.push_back({lifted, cyc});
        }

        if (e >= 2) {
            // 1 + P k with d(k) < d(P)(e-1)
            const std::uint64_t count = checked_pow(P.norm(), e - 1);
            std::vector<std::uint64_t> one_plus_p;
            one_plus_p.reserve(count);
            for (std::uint64_t k = 0; k < count; ++k) {
                FqPoly u = FqPoly::constant(F, 1) + P * FqPoly::from_code(F, k);
                one_plus_p.push_back(local.reduce(u));
            }
            std::sort(one_plus_p.begin(), one_plus_p.end());
            for (const auto& b : abelian_basis(local, one_plus_p)) local_basis.push_back(b);
        }

        // CRT idempotent: E = 1 mod P^e, 0 mod Q / P^e
        const FqPoly cofactor = poly_divmod(Q, Pe).quotient;
        FqPoly idem = FqPoly::constant(F, 1);
        if (cofactor.degree() > 0) idem = poly_mod(cofactor * poly_inverse_mod(cofactor, Pe), Q);
        for (const auto& b : local_basis) {
            FqPoly g = FqPoly::constant(F, 1) + (local.lift(b.code) - FqPoly::constant(F, 1)) * idem;
            G.generators_.push_back(global.lift(global.reduce(g)));
            G.orders_.push_back(b.order);
        }
    }

    G.finish_tables();
    G.build_kernels();
    return G;
}

void UnitGroup::finish_tables() {
    const std::size_t r = orders_.size();
    strides_.assign(r, 1);
    for (std::size_t j = r; j-- > 1;) strides_[j - 1] = strides_[j] * orders_[j];
    std::uint64_t total = 1;
    exponent_ = 1;
    for (auto o : orders_) {
        total *= o;
        exponent_ = std::lcm(exponent_, o);
    }
    if (total != modulus_.phi()) throw std::logic_error("generator orders do not multiply to phi(Q)");

    std::vector<std::uint64_t> gen_codes;
    for (std::size_t j = 0; j < r; ++j) {
        gen_codes.push_back(ring_.reduce(generators_[j]));
        if (ring_.pow(gen_codes[j], orders_[j]) != ring_.one()) throw std::logic_error("generator order mismatch");
    }

    // odometer over exponent vectors, a_r fastest; level[j] = prod_{i<=j} g_i^{a_i}
    if (dlog_.empty()) {
        dlog_.assign(ring_.size(), -1);
        unit_codes_.assign(total, 0);
        std::vector<std::uint64_t> a(r, 0);
        std::vector<std::uint64_t> level(r + 1, ring_.one());
        for (std::uint64_t idx = 0; idx < total; ++idx) {
            const std::uint64_t code = level[r];
            if (dlog_[code] != -1) throw std::logic_error("exponent map is not injective");
            dlog_[code] = static_cast<std::int64_t>(idx);
            unit_codes_[idx] = code;
            std::size_t j = r;
            while (j > 0) {
                --j;
                if (++a[j] < orders_[j]) {
                    level[j + 1] = ring_.mul(level[j + 1], gen_codes[j]);
                    for (std::size_t i = j + 1; i < r; ++i) level[i + 1] = level[j + 1];
                    break;
                }
                a[j] = 0;
            }
        }
    } else {
        unit_codes_.assign(total, 0);
        std::uint64_t seen = 0;
        for (std::uint64_t c = 0; c < dlog_.size(); ++c) {
            if (dlog_[c] < 0) continue;
            if (static_cast<std::uint64_t>(dlog_[c]) >= total) throw std::runtime_error("dlog entry out of range");
            unit_codes_[static_cast<std::uint64_t>(dlog_[c])] = c;
            ++seen;
        }
        if (seen != total) throw std::runtime_error("dlog table does not cover phi(Q) units");
    }
    if (dlog_code(ring_.one()) != std::uint64_t{0}) throw std::logic_error("dlog(1) is not the zero vector");
}

void UnitGroup::build_kernels() {
    const FieldSpec F = modulus_.field();
    kernels_.clear();
    for (const auto& [P, e] : modulus_.factors()) {
        const FqPoly reduced = poly_divmod(modulus_.poly(), P).quotient;
        std::vector<std::uint64_t> kernel;
        for (std::uint64_t k = 0; k < P.norm(); ++k) {
            FqPoly u = FqPoly::constant(F, 1) + reduced * FqPoly::from_code(F, k);
            if (auto idx = dlog(u)) kernel.push_back(*idx);
        }
        kernels_.push_back(std::move(kernel));
    }
}

std::optional<std::uint64_t> UnitGroup::dlog_code(std::uint64_t code) const {
    if (code >= dlog_.size() || dlog_[code] < 0) return std::nullopt;
    return static_cast<std::uint64_t>(dlog_[code]);
}

std::vector<std::uint64_t> UnitGroup::unpack(std::uint64_t packed) const {
    std::vector<std::uint64_t> a(orders_.size());
    for (std::size_t j = 0; j < orders_.size(); ++j) a[j] = packed / strides_[j] % orders_[j];
    return a;
}

std::uint64_t UnitGroup::pack(std::span<const std::uint64_t> exponents) const {
    if (exponents.size() != orders_.size()) throw DomainError("exponent vector has the wrong length");
    std::uint64_t p = 0;
    for (std::size_t j = 0; j < orders_.size(); ++j) p += (exponents[j] % orders_[j]) * strides_[j];
    return p;
}

// ---------------------------------------------------------------------------
// cache

nlohmann::json unit_group_to_json(const UnitGroup& g) {
    nlohmann::json j;
    j["version"] = kUnitGroupCacheVersion;
    j["q"] = g.modulus().field().q();
    j["modulus"] = to_string(g.modulus().poly());
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& p : g.generators()) gens.push_back(to_string(p));
    j["generators"] = gens;
    j["orders"] = std::vector<std::uint64_t>(g.orders().begin(), g.orders().end());
    j["dlog"] = std::vector<std::int64_t>(g.dlog_table().begin(), g.dlog_table().end());
    return j;
}

UnitGroup unit_group_from_json(const nlohmann::json& j, const Modulus& m) {
    if (j.at("version").get<int>() != kUnitGroupCacheVersion) throw std::runtime_error("unit group cache version mismatch");
    if (j.at("q").get<std::uint32_t>() != m.field().q()) throw std::runtime_error("unit group cache field mismatch");
    if (parse_poly(m.field(), j.at("modulus").get<std::string>()) != m.poly()) {
        throw std::runtime_error("unit group cache modulus mismatch");
    }
    UnitGroup G(m);
    for (const auto& s : j.at("generators")) G.generators_.push_back(parse_poly(m.field(), s.get<std::string>()));
    G.orders_ = j.at("orders").get<std::vector<std::uint64_t>>();
    if (G.orders_.size() != G.generators_.size()) throw std::runtime_error("unit group cache is inconsistent");
    G.dlog_ = j.at("dlog").get<std::vector<std::int64_t>>();
    if (G.dlog_.size() != G.ring_.size()) throw std::runtime_error("unit group cache has the wrong table size");
    G.finish_tables();

    // cheap re-verification: random exponent vectors round-trip through the table
    std::mt19937_64 rng(m.poly().code() ^ 0x9e3779b97f4a7c15ULL);
    for (int trial = 0; trial < 100; ++trial) {
        std::uint64_t code = G.ring_.one();
        std::vector<std::uint64_t> a(G.orders_.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] = rng() % G.orders_[k];
            code = G.ring_.mul(code, G.ring_.pow(G.ring_.reduce(G.generators_[k]), a[k]));
        }
        if (G.dlog_code(code) != G.pack(a)) throw std::runtime_error("unit group cache failed a round-trip check");
    }
    G.build_kernels();
    return G;
}

// ---------------------------------------------------------------------------
// characters

DirichletChar::DirichletChar(std::shared_ptr<const UnitGroup> group, std::vector<std::uint64_t> exponents)
    : group_(std::move(group)), exponents_(std::move(exponents)) {
    const auto orders = group_->orders();
    if (exponents_.size() != orders.size()) throw DomainError("character exponent vector has the wrong length");
    const std::uint64_t M = group_->exponent();
    principal_ = true;
    index_ = 0;
    for (std::size_t j = 0; j < orders.size(); ++j) {
        if (exponents_[j] >= orders[j]) throw DomainError("character exponent out of range");
        if (exponents_[j] != 0) principal_ = false;
        weights_.push_back(exponents_[j] * (M / orders[j]) % M);
        index_ = index_ * orders[j] + exponents_[j];
    }
    primitive_ = is_primitive(*this);
}

std::uint64_t DirichletChar::phase_of_unit(std::uint64_t packed) const {
    const std::uint64_t M = group_->exponent();
    const auto a = group_->unpack(packed);
    std::uint64_t p = 0;
    for (std::size_t j = 0; j < a.size(); ++j) p = (p + a[j] % M * weights_[j]) % M;
    return p;
}

std::optional<std::uint64_t> DirichletChar::phase(const FqPoly& f) const {
    auto idx = group_->dlog(f);
    if (!idx) return std::nullopt;
    return phase_of_unit(*idx);
}

DirichletChar DirichletChar::conjugate() const {
    const auto orders = group_->orders();
    std::vector<std::uint64_t> neg(exponents_.size());
    for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = (orders[j] - exponents_[j]) % orders[j];
    return DirichletChar(group_, std::move(neg));
}

std::vector<DirichletChar> all_characters(std::shared_ptr<const UnitGroup> group) {
    const auto orders = group->orders();
    const std::size_t r = orders.size();
    std::vector<DirichletChar> out;
    out.reserve(group->order());
    std::vector<std::uint64_t> k(r, 0);
    for (std::uint64_t n = 0; n < group->order(); ++n) {
        out.emplace_back(group, k);
        for (std::size_t j = r; j-- > 0;) {
            if (++k[j] < orders[j]) break;
            k[j] = 0;
        }
    }
    return out;
}

bool is_primitive(const DirichletChar& chi) {
    if (chi.principal()) return false;
    for (const auto& kernel : chi.group().reduction_kernels()) {
        bool nontrivial = false;
        for (auto u : kernel) {
            if (chi.phase_of_unit(u) != 0) {
                nontrivial = true;
                break;
            }
        }
        if (!nontrivial) return false;
    }
    return true;
}

std::complex<double> root_of_unity(std::uint64_t n, std::uint64_t p) {
    p %= n;
    if (p == 0) return {1.0, 0.0};
    if (2 * p == n) return {-1.0, 0.0};
    if (4 * p == n) return {0.0, 1.0};
    if (4 * p == 3 * n) return {0.0, -1.0};
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

std::complex<double> char_eval(const DirichletChar& chi, const FqPoly& f) {
    auto p = chi.phase(f);
    if (!p) return {0.0, 0.0};
    return root_of_unity(chi.group().exponent(), *p);
}

}  // namespace ffm
