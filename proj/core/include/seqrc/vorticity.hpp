#pragma once

// Periodic 2D incompressible Navier-Stokes in vorticity form on [0,1)^2:
//   dw/dt + u . grad w = nu lap w + f,   u = (d psi/dy, -d psi/dx),  -lap psi = w.

#include "seqrc/random.hpp"
#include "seqrc/series.hpp"

#include <complex>
#include <memory>
#include <vector>

namespace seqrc {

namespace detail {
class Fft2d;
}

struct VorticityParams {
    /// Grid points per side; a power of two.
    Index n = 64;
    double reynolds = 500.0;
    double dt = 1e-3;
    Index n_steps = 1000;
    Index output_stride = 10;
    /// Steps run before the first emitted snapshot.
    Index spinup_steps = 0;
    bool forcing = true;
    std::uint64_t grf_seed = 0;
    /// Largest allowed max(|u|, |v|) dt / dx.
    double max_courant = 1.0;

    double viscosity() const noexcept { return 1.0 / reynolds; }
    void validate() const;
};

/// Field values are row-major n x n; row index follows x2, column index x1,
/// with grid point (r, c) at (c / n, r / n).
using VorticityField = Vector;

/// Gaussian random field with spectral amplitude 7^1.5 (4 pi^2 |k|^2 + 49)^-1.25
/// per wavenumber and zero mean.
VorticityField grf_initial(const VorticityParams& params, RandomStream& rng);
VorticityField grf_initial(const VorticityParams& params);

/// 0.1 (sin(2 pi (x1 + x2)) + cos(2 pi (x1 + x2)))
VorticityField vorticity_forcing(Index n);

class VorticitySolver {
public:
    VorticitySolver(const VorticityParams& params, const VorticityField& initial);
    ~VorticitySolver();
    VorticitySolver(VorticitySolver&&) noexcept;
    VorticitySolver& operator=(VorticitySolver&&) noexcept;

    /// Heun for advection and forcing, Crank-Nicolson for diffusion.
    /// Throws CflViolation when the advective Courant number exceeds the bound.
    void step();
    VorticityField field();
    double time() const noexcept { return time_; }
    /// Largest Courant number seen on the last step.
    double last_courant() const noexcept { return last_courant_; }

private:
    using Spectrum = std::vector<std::complex<double>>;
    void advection(const Spectrum& w_hat, Spectrum& out);

    VorticityParams params_;
    std::unique_ptr<detail::Fft2d> fft_;
    Spectrum w_hat_, forcing_hat_, nonlinear_, stage_, nonlinear_stage_;
    Spectrum scratch_;
    std::vector<double> kx_, ky_, lap_;
    std::vector<unsigned char> keep_;
    std::vector<double> u_, v_;
    double time_ = 0.0;
    double last_courant_ = 0.0;
};

/// Row 0 is the state after spinup, then one snapshot every output_stride steps.
SeriesData vorticity_simulate(const VorticityParams& params, const VorticityField& initial);

double field_mean(const VorticityField& w);
/// Sum of squares over the grid.
double enstrophy(const VorticityField& w);

}  // namespace seqrc
