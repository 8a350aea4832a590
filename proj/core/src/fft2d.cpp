#include "fft2d.hpp"

#include <mutex>
#include <new>

namespace seqrc::detail {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

}  // namespace

Fft2d::Fft2d(std::size_t n) : n_(n)
{
    std::lock_guard lock(planner_mutex());
    real_ = fftw_alloc_real(n * n);
    spectrum_ = fftw_alloc_complex(n * half());
    if (real_ == nullptr || spectrum_ == nullptr) {
        fftw_free(real_);
        fftw_free(spectrum_);
        throw std::bad_alloc();
    }
    const int ni = static_cast<int>(n);
    forward_ = fftw_plan_dft_r2c_2d(ni, ni, real_, spectrum_, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    inverse_ = fftw_plan_dft_c2r_2d(ni, ni, spectrum_, real_, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
}

Fft2d::~Fft2d()
{
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(spectrum_);
}

void Fft2d::forward()
{
    fftw_execute(forward_);
}

void Fft2d::inverse()
{
    fftw_execute(inverse_);
}

}  // namespace seqrc::detail
