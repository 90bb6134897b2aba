#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace sfde {

/// Complex 1D FFT of a fixed length, backed by FFTW with estimate-mode plans
/// so results are bit-reproducible run to run. Execution works on any
/// caller-owned buffer; the plan itself is immutable and shareable.
class FftPlan {
public:
    explicit FftPlan(std::size_t length);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::size_t length() const noexcept { return length_; }

    /// In place, unnormalized: X_k = sum_j x_j exp(-2 pi i jk / L).
    void forward(std::span<std::complex<double>> data) const;
    /// In place, unnormalized inverse (no 1/L factor).
    void backward(std::span<std::complex<double>> data) const;

private:
    std::size_t length_;
    void* forward_plan_;
    void* backward_plan_;
};

/// Shared plan for a given length; plans are created once per process.
std::shared_ptr<const FftPlan> fft_plan(std::size_t length);

} // namespace sfde
