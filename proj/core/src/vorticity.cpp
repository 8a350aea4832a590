#include "seqrc/vorticity.hpp"

#include "fft2d.hpp"
#include "seqrc/error.hpp"

#include <cmath>
#include <numbers>

namespace seqrc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(Index n)
{
    return n > 0 && (n & (n - 1)) == 0;
}

// Signed wavenumber of FFT bin `i` on a grid of n.
double wavenumber(Index i, Index n)
{
    return static_cast<double>(i <= n / 2 ? i : i - n);
}

}  // namespace

void VorticityParams::validate() const
{
    if (n < 4 || !is_power_of_two(n)) throw Error(ErrorCode::InvalidSpec, "vorticity grid must be a power of two >= 4");
    if (!(reynolds > 0.0) || !std::isfinite(reynolds))
        throw Error(ErrorCode::InvalidSpec, "Reynolds number must be positive");
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidSpec, "dt must be positive");
    if (n_steps < 0 || spinup_steps < 0) throw Error(ErrorCode::InvalidSpec, "step counts must be >= 0");
    if (output_stride < 1) throw Error(ErrorCode::InvalidSpec, "output_stride must be >= 1");
    if (!(max_courant > 0.0)) throw Error(ErrorCode::InvalidSpec, "max_courant must be positive");
}

VorticityField grf_initial(const VorticityParams& params, RandomStream& rng)
{
    params.validate();
    const Index n = params.n;
    detail::Fft2d fft(static_cast<std::size_t>(n));
    for (Index i = 0; i < n * n; ++i) fft.real()[i] = rng.normal();
    fft.forward();

    const Index half = n / 2 + 1;
    const double scale = std::pow(7.0, 1.5) / static_cast<double>(n);
    auto* spec = fft.spectrum();
    for (Index r = 0; r < n; ++r) {
        const double ky = wavenumber(r, n);
        for (Index c = 0; c < half; ++c) {
            const double kx = static_cast<double>(c);
            auto& z = spec[r * half + c];
            if ((r == 0 && c == 0) || r == n / 2 || c == n / 2) {
                z = 0.0;
                continue;
            }
            const double k2 = kx * kx + ky * ky;
            z *= scale * std::pow(4.0 * std::numbers::pi * std::numbers::pi * k2 + 49.0, -1.25);
        }
    }
    fft.inverse();
    VorticityField w(n * n);
    for (Index i = 0; i < n * n; ++i) w[i] = fft.real()[i];
    return w;
}

VorticityField grf_initial(const VorticityParams& params)
{
    RandomStream rng(params.grf_seed, 0);
    return grf_initial(params, rng);
}

VorticityField vorticity_forcing(Index n)
{
    VorticityField f(n * n);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c) {
            const double s = kTwoPi * static_cast<double>(r + c) / static_cast<double>(n);
            f[r * n + c] = 0.1 * (std::sin(s) + std::cos(s));
        }
    return f;
}

VorticitySolver::VorticitySolver(const VorticityParams& params, const VorticityField& initial) : params_(params)
{
    params_.validate();
    const Index n = params_.n;
    if (initial.size() != n * n)
        throw Error(ErrorCode::DimensionMismatch, "initial vorticity has " + std::to_string(initial.size()) +
                                                      " values, grid needs " + std::to_string(n * n));
    if (!initial.allFinite()) throw Error(ErrorCode::NonFiniteValue, "initial vorticity is not finite");

    fft_ = std::make_unique<detail::Fft2d>(static_cast<std::size_t>(n));
    const Index half = n / 2 + 1;
    const auto bins = static_cast<std::size_t>(n * half);
    kx_.resize(bins);
    ky_.resize(bins);
    lap_.resize(bins);
    keep_.resize(bins);
    const double cutoff = 2.0 / 3.0 * static_cast<double>(n / 2);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < half; ++c) {
            const auto b = static_cast<std::size_t>(r * half + c);
            const double ky = wavenumber(r, n);
            const double kx = static_cast<double>(c);
            // Nyquist bins carry no well-defined derivative.
            kx_[b] = c == n / 2 ? 0.0 : kx;
            ky_[b] = r == n / 2 ? 0.0 : ky;
            lap_[b] = 4.0 * std::numbers::pi * std::numbers::pi * (kx * kx + ky * ky);
            keep_[b] = std::abs(kx) <= cutoff && std::abs(ky) <= cutoff ? 1 : 0;
        }

    auto to_spectrum = [&](const VorticityField& field, Spectrum& out) {
        for (Index i = 0; i < n * n; ++i) fft_->real()[i] = field[i];
        fft_->forward();
        out.assign(fft_->spectrum(), fft_->spectrum() + bins);
    };
    to_spectrum(initial, w_hat_);
    if (params_.forcing) {
        to_spectrum(vorticity_forcing(n), forcing_hat_);
        forcing_hat_[0] = 0.0;
    } else {
        forcing_hat_.assign(bins, 0.0);
    }
    nonlinear_.resize(bins);
    stage_.resize(bins);
    nonlinear_stage_.resize(bins);
    scratch_.resize(bins);
    u_.resize(static_cast<std::size_t>(n * n));
    v_.resize(static_cast<std::size_t>(n * n));
}

VorticitySolver::~VorticitySolver() = default;
VorticitySolver::VorticitySolver(VorticitySolver&&) noexcept = default;
VorticitySolver& VorticitySolver::operator=(VorticitySolver&&) noexcept = default;

void VorticitySolver::advection(const Spectrum& w_hat, Spectrum& out)
{
    const Index n = params_.n;
    const auto cells = static_cast<std::size_t>(n * n);
    const std::size_t bins = w_hat.size();
    const std::complex<double> i2pi(0.0, kTwoPi);
    auto* spec = fft_->spectrum();
    double* real = fft_->real();
    // The unnormalized inverse scales by n^2; fold it into one factor per product.
    const double norm = 1.0 / static_cast<double>(cells);

    // u = d psi / dx2
    for (std::size_t b = 0; b < bins; ++b) spec[b] = b == 0 ? 0.0 : i2pi * ky_[b] * w_hat[b] / lap_[b];
    fft_->inverse();
    std::copy(real, real + cells, u_.begin());
    // v = -d psi / dx1
    for (std::size_t b = 0; b < bins; ++b) spec[b] = b == 0 ? 0.0 : -i2pi * kx_[b] * w_hat[b] / lap_[b];
    fft_->inverse();
    std::copy(real, real + cells, v_.begin());

    double max_speed = 0.0;
    for (std::size_t i = 0; i < cells; ++i) max_speed = std::max({max_speed, std::abs(u_[i]), std::abs(v_[i])});
    last_courant_ = std::max(last_courant_, max_speed * norm * params_.dt * static_cast<double>(n));

    // u dw/dx1 + v dw/dx2, accumulated in u_.
    for (std::size_t b = 0; b < bins; ++b) spec[b] = i2pi * kx_[b] * w_hat[b];
    fft_->inverse();
    for (std::size_t i = 0; i < cells; ++i) u_[i] *= real[i];
    for (std::size_t b = 0; b < bins; ++b) spec[b] = i2pi * ky_[b] * w_hat[b];
    fft_->inverse();
    for (std::size_t i = 0; i < cells; ++i) real[i] = (u_[i] + v_[i] * real[i]) * norm * norm;
    fft_->forward();
    for (std::size_t b = 0; b < bins; ++b) out[b] = keep_[b] && b != 0 ? spec[b] : 0.0;
}

void VorticitySolver::step()
{
    const double dt = params_.dt;
    const double nu = params_.viscosity();
    const std::size_t bins = w_hat_.size();
    last_courant_ = 0.0;

    advection(w_hat_, nonlinear_);
    for (std::size_t b = 0; b < bins; ++b) {
        const double d = 0.5 * dt * nu * lap_[b];
        stage_[b] = (w_hat_[b] * (1.0 - d) + dt * (forcing_hat_[b] - nonlinear_[b])) / (1.0 + d);
    }
    advection(stage_, nonlinear_stage_);
    for (std::size_t b = 0; b < bins; ++b) {
        const double d = 0.5 * dt * nu * lap_[b];
        const auto drive = forcing_hat_[b] - 0.5 * (nonlinear_[b] + nonlinear_stage_[b]);
        w_hat_[b] = (w_hat_[b] * (1.0 - d) + dt * drive) / (1.0 + d);
    }
    time_ += dt;
    if (last_courant_ > params_.max_courant)
        throw Error(ErrorCode::CflViolation, "advective Courant number " + std::to_string(last_courant_) +
                                                 " exceeds " + std::to_string(params_.max_courant));
    if (!std::isfinite(std::abs(w_hat_[1])) || !std::isfinite(last_courant_))
        throw Error(ErrorCode::NonFiniteState, "vorticity solver diverged at t = " + std::to_string(time_));
}

VorticityField VorticitySolver::field()
{
    const Index n = params_.n;
    std::copy(w_hat_.begin(), w_hat_.end(), fft_->spectrum());
    fft_->inverse();
    VorticityField w(n * n);
    const double norm = 1.0 / static_cast<double>(n * n);
    for (Index i = 0; i < n * n; ++i) w[i] = fft_->real()[i] * norm;
    return w;
}

SeriesData vorticity_simulate(const VorticityParams& params, const VorticityField& initial)
{
    VorticitySolver solver(params, initial);
    for (Index s = 0; s < params.spinup_steps; ++s) solver.step();
    const Index rows = 1 + params.n_steps / params.output_stride;
    SeriesData out;
    out.values.resize(rows, params.n * params.n);
    out.dt = params.dt * static_cast<double>(params.output_stride);
    out.shape = FieldShape{params.n, params.n};
    out.values.row(0) = solver.field().transpose();
    Index row = 1;
    for (Index s = 1; s <= params.n_steps; ++s) {
        solver.step();
        if (s % params.output_stride == 0) {
            VorticityField w = solver.field();
            if (!w.allFinite())
                throw Error(ErrorCode::NonFiniteState, "vorticity field diverged at step " + std::to_string(s));
            out.values.row(row++) = w.transpose();
        }
    }
    return out;
}

double field_mean(const VorticityField& w)
{
    return w.mean();
}

double enstrophy(const VorticityField& w)
{
    return w.squaredNorm();
}

}  // namespace seqrc
