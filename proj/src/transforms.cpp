#include "sfde/transforms.hpp"

#include <cmath>
#include <stdexcept>

namespace sfde {

SineTransformPlan::SineTransformPlan(std::size_t n)
    : n_(n), scale_(std::sqrt(2.0 / static_cast<double>(n + 1)))
{
    if (n == 0)
        throw std::invalid_argument("sine transform length must be positive");
    fft_ = fft_plan(2 * (n + 1));
}

void SineTransformPlan::apply(std::span<const double> in, std::span<double> out) const
{
    std::vector<std::complex<double>> scratch(2 * (n_ + 1));
    apply(in, out, scratch);
}

void SineTransformPlan::apply(std::span<const double> in, std::span<double> out,
                              std::span<std::complex<double>> scratch) const
{
    if (in.size() != n_ || out.size() != n_)
        throw std::invalid_argument("sine transform: vector length does not match plan");
    if (scratch.size() != 2 * (n_ + 1))
        throw std::invalid_argument("sine transform: scratch must hold 2(n+1) entries");

    // Odd extension [0, x, 0, -reverse(x)]; its DFT is -2i times the sine sums.
    const std::size_t period = 2 * (n_ + 1);
    scratch[0] = 0.0;
    scratch[n_ + 1] = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
        scratch[j + 1] = in[j];
        scratch[period - 1 - j] = -in[j];
    }
    fft_->forward(scratch);
    const double factor = -0.5 * scale_;
    for (std::size_t k = 0; k < n_; ++k)
        out[k] = factor * scratch[k + 1].imag();
}

std::vector<double> SineTransformPlan::apply(std::span<const double> in) const
{
    std::vector<double> out(n_);
    apply(in, out);
    return out;
}

std::vector<double> dst1_apply(const SineTransformPlan& plan, std::span<const double> x) { return plan.apply(x); }

std::vector<SineTransformPlan> make_sine_plans(const Shape& shape)
{
    std::vector<SineTransformPlan> plans;
    plans.reserve(shape.size());
    for (std::size_t n : shape)
        plans.emplace_back(n);
    return plans;
}

void tensor_dst_apply_inplace(const std::vector<SineTransformPlan>& plans, Field& u)
{
    if (plans.size() != u.dimension())
        throw std::invalid_argument("tensor sine transform: one plan per axis required");
    for (std::size_t axis = 0; axis < plans.size(); ++axis)
        if (plans[axis].size() != u.shape()[axis])
            throw std::invalid_argument("tensor sine transform: plan length does not match field shape");

    auto data = u.values();
    for (std::size_t axis = 0; axis < plans.size(); ++axis) {
        const SineTransformPlan& plan = plans[axis];
        const std::size_t n = plan.size();
        if (n == 1)
            continue; // S_1 = [1]
        std::vector<double> line(n);
        std::vector<std::complex<double>> scratch(2 * (n + 1));
        for_each_line(u.shape(), axis, [&](std::size_t offset, std::size_t stride) {
            for (std::size_t j = 0; j < n; ++j)
                line[j] = data[offset + j * stride];
            plan.apply(line, line, scratch);
            for (std::size_t j = 0; j < n; ++j)
                data[offset + j * stride] = line[j];
        });
    }
}

Field tensor_dst_apply(const std::vector<SineTransformPlan>& plans, const Field& u)
{
    Field out = u;
    tensor_dst_apply_inplace(plans, out);
    return out;
}

} // namespace sfde
