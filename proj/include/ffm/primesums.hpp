#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ffm/ffpoly.hpp"

namespace ffm {

/// A cutoff x = q^h on the norm |P|. Sums over |P| <= x only change at powers
/// of q, so only those are representable.
class NormCutoff {
  public:
    explicit NormCutoff(int h);
    /// Throws DomainError unless x is q^h for an integer h >= 0.
    static NormCutoff from_value(FieldSpec field, double x);

    int log_q() const noexcept { return h_; }
    double log_value(FieldSpec field) const;

  private:
    int h_;
};

/// Prime counts pi(n) for n <= max_degree, and the primes themselves for
/// n <= listed_degree (enumeration is exhaustive, so keep that small).
class PrimeTable {
  public:
    PrimeTable(FieldSpec field, int max_degree, int listed_degree);

    const FieldSpec& field() const noexcept { return field_; }
    int max_degree() const noexcept { return max_degree_; }
    int listed_degree() const noexcept { return static_cast<int>(primes_.size()) - 1; }

    /// pi(n); requires q^n to fit in 64 bits.
    std::uint64_t count(int n) const;
    /// pi(n) / q^n, valid for every n <= max_degree.
    double density(int n) const;
    std::span<const FqPoly> primes(int n) const;

  private:
    FieldSpec field_;
    int max_degree_;
    std::vector<double> density_;
    std::vector<std::uint64_t> counts_;
    std::vector<std::vector<FqPoly>> primes_;
};

struct EstimateDefect {
    double value;
    double estimate;
    double defect;  // value - estimate
};

/// sum_{|P|<=x} log|P| / |P| against log x.
EstimateDefect logp_sum(const PrimeTable& table, NormCutoff x);
/// sum_{|P|<=x} 1/|P|. Requires h >= 1.
double recip_sum(const PrimeTable& table, NormCutoff x);

struct MertensFit {
    double b;                                 // intercept of recip_sum - log log x against 1/log x
    double slope;
    std::vector<double> residual_times_log;   // (recip_sum - log log x - b) * log x, per h
};
/// Least-squares fit over h = h_min..h_max.
MertensFit fit_mertens_constant(const PrimeTable& table, int h_min, int h_max);

/// sum_{|P|<=x} cos(alpha log|P|) / |P|.
double mertens_cos_sum(const PrimeTable& table, NormCutoff x, double alpha);
/// sum_{n=1}^h cos(n theta) / n.
double F_sum(int h, double theta);
/// log|zeta_A(1 + 1/log x + i alpha)| from the closed form.
double zeta_log_estimate(FieldSpec field, NormCutoff x, double alpha);
/// log min(log x, 1/theta_bar(alpha log q)); theta_bar = 0 resolves to log log x.
double log_min_estimate(FieldSpec field, NormCutoff x, double alpha);
/// log min(h, 1/theta_bar(theta)).
double log_min_h(int h, double theta);

struct PrimePowerTail {
    double head;              // sum_{|P|<=x} (1/|P| - 1/|P|^{1+1/log x})
    double tail;              // sum_{x<|P|, d(P)<=truncation} 1/|P|^{1+1/log x}
    double remainder_bound;   // bound on the omitted degrees > truncation
    int truncation_degree;
    double total() const noexcept { return head + tail; }
};
/// Default truncation is degree 8h, which keeps the remainder below 1e-4.
PrimePowerTail prime_power_tail(const PrimeTable& table, NormCutoff x, int truncation_degree = -1);
/// sum_{n>T} e^{-n/h}/n <= e^{-(T+1)/h} / ((T+1)(1 - e^{-1/h})), using pi(n) <= q^n/n.
double tail_remainder_bound(int h, int truncation_degree);

}  // namespace ffm
