#pragma once

#include "sfde/fft.hpp"
#include "sfde/field.hpp"

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace sfde {

/// Type-I discrete sine transform S_n with entries
/// sqrt(2/(n+1)) sin(jk pi/(n+1)), 1 <= j,k <= n. S_n is symmetric and
/// involutory, so the same plan serves as forward and inverse.
class SineTransformPlan {
public:
    explicit SineTransformPlan(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    double normalization() const noexcept { return scale_; }

    /// out = S_n in. `in` and `out` may alias.
    void apply(std::span<const double> in, std::span<double> out) const;
    /// Same, with a caller-provided scratch of length 2(n+1).
    void apply(std::span<const double> in, std::span<double> out,
               std::span<std::complex<double>> scratch) const;
    std::vector<double> apply(std::span<const double> in) const;

private:
    std::size_t n_;
    double scale_;
    std::shared_ptr<const FftPlan> fft_;
};

std::vector<double> dst1_apply(const SineTransformPlan& plan, std::span<const double> x);

/// Plans for every axis of `shape`.
std::vector<SineTransformPlan> make_sine_plans(const Shape& shape);

/// Applies S_{n_i} along every axis in turn (x, then y, then z); equals
/// (S_{n_d} kron ... kron S_{n_1}) vec(u) under x-fastest ordering.
Field tensor_dst_apply(const std::vector<SineTransformPlan>& plans, const Field& u);
void tensor_dst_apply_inplace(const std::vector<SineTransformPlan>& plans, Field& u);

} // namespace sfde
