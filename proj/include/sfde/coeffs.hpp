#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace sfde {

/// Fractional order delta of one axis; the flux derivative has order 1 - delta
/// and the full operator order 2 - delta. Only the open interval (0, 1) is valid.
class FractionalOrder {
public:
    explicit FractionalOrder(double value);

    double value() const noexcept { return value_; }

    friend bool operator==(FractionalOrder a, FractionalOrder b) noexcept { return a.value_ == b.value_; }

private:
    double value_;
};

/// s_0..s_n and q_0..q_n for one (order, n) pair.
///
/// q is the first difference of s with q_0 = -s_0, so the partial sums
/// q_0 + ... + q_m telescope to -s_m.
struct CoefficientTable {
    FractionalOrder order;
    std::size_t n;
    std::vector<double> s;
    std::vector<double> q;
};

std::vector<double> compute_s_coefficients(FractionalOrder order, std::size_t n);
std::vector<double> compute_q_coefficients(FractionalOrder order, std::size_t n);

/// Cached table, shared across time steps and operators. Safe to call from
/// multiple threads.
std::shared_ptr<const CoefficientTable> coefficient_table(FractionalOrder order, std::size_t n);

} // namespace sfde
