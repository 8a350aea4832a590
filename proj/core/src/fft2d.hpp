#pragma once

// Square real 2D transforms over FFTW, with plan-owned aligned buffers.

#include <fftw3.h>

#include <complex>
#include <cstddef>

namespace seqrc::detail {

class Fft2d {
public:
    explicit Fft2d(std::size_t n);
    ~Fft2d();
    Fft2d(const Fft2d&) = delete;
    Fft2d& operator=(const Fft2d&) = delete;

    std::size_t size() const noexcept { return n_; }
    /// n / 2 + 1
    std::size_t half() const noexcept { return n_ / 2 + 1; }

    /// n x n row-major physical field.
    double* real() noexcept { return real_; }
    /// n x (n/2 + 1) row-major half spectrum.
    std::complex<double>* spectrum() noexcept { return reinterpret_cast<std::complex<double>*>(spectrum_); }

    /// real() -> spectrum(); real() is preserved.
    void forward();
    /// spectrum() -> real(), unnormalized (scaled by n^2); spectrum() is clobbered.
    void inverse();

private:
    std::size_t n_;
    double* real_ = nullptr;
    fftw_complex* spectrum_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan inverse_ = nullptr;
};

}  // namespace seqrc::detail
