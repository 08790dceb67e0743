#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace ffm {

/// Pairwise (cascade) summation with a fixed split rule, so the rounding
/// pattern depends only on the input order.
template <class T>
T pairwise_sum(std::span<const T> xs) {
    constexpr std::size_t kBlock = 8;
    if (xs.size() <= kBlock) {
        T acc{};
        for (const auto& x : xs) acc += x;
        return acc;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_sum_real(std::span<const double> xs) { return pairwise_sum<double>(xs); }
inline std::complex<double> pairwise_sum_complex(std::span<const std::complex<double>> xs) {
    return pairwise_sum<std::complex<double>>(xs);
}

}  // namespace ffm
