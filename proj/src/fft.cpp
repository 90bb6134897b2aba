#include "sfde/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace sfde {

namespace {

// FFTW's planner is not re-entrant; execution with fftw_execute_dft is.
// Plans are created in place, so every execution must be in place too.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

} // namespace

FftPlan::FftPlan(std::size_t length) : length_(length)
{
    if (length == 0)
        throw std::invalid_argument("FFT length must be positive");
    std::vector<std::complex<double>> buffer(length);
    const int n = static_cast<int>(length);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(planner_mutex());
    forward_plan_ = fftw_plan_dft_1d(n, as_fftw(buffer.data()), as_fftw(buffer.data()), FFTW_FORWARD, flags);
    backward_plan_ = fftw_plan_dft_1d(n, as_fftw(buffer.data()), as_fftw(buffer.data()), FFTW_BACKWARD, flags);
    if (!forward_plan_ || !backward_plan_)
        throw std::runtime_error("FFTW failed to create a plan");
}

FftPlan::~FftPlan()
{
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void FftPlan::forward(std::span<std::complex<double>> data) const
{
    if (data.size() != length_)
        throw std::invalid_argument("FFT buffer length mismatch");
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data.data()), as_fftw(data.data()));
}

void FftPlan::backward(std::span<std::complex<double>> data) const
{
    if (data.size() != length_)
        throw std::invalid_argument("FFT buffer length mismatch");
    fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(data.data()), as_fftw(data.data()));
}

std::shared_ptr<const FftPlan> fft_plan(std::size_t length)
{
    static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto& slot = cache[length];
    if (!slot)
        slot = std::make_shared<const FftPlan>(length);
    return slot;
}

} // namespace sfde
