#include "seqrc/shallow_water.hpp"

#include "seqrc/error.hpp"

#include <cmath>

namespace seqrc {

double SWEParams::cfl_limit() const noexcept
{
    return std::min(dx(), dy()) / std::sqrt(gravity * depth);
}

double SWEParams::effective_dt() const noexcept
{
    return dt > 0.0 ? dt : cfl_fraction * cfl_limit();
}

void SWEParams::validate() const
{
    if (nx < 3 || ny < 3) throw Error(ErrorCode::InvalidSpec, "shallow-water grid must be at least 3x3");
    if (!(lx > 0.0) || !(ly > 0.0)) throw Error(ErrorCode::InvalidSpec, "domain lengths must be positive");
    if (!(gravity > 0.0) || !(depth > 0.0)) throw Error(ErrorCode::InvalidSpec, "gravity and depth must be positive");
    if (!(rho0 > 0.0)) throw Error(ErrorCode::InvalidSpec, "reference density must be positive");
    if (dt < 0.0 || !std::isfinite(dt)) throw Error(ErrorCode::InvalidSpec, "dt must be >= 0");
    if (dt == 0.0 && !(cfl_fraction > 0.0)) throw Error(ErrorCode::InvalidSpec, "cfl_fraction must be positive");
    if (n_steps < 0) throw Error(ErrorCode::InvalidSpec, "n_steps must be >= 0");
    if (output_stride < 1) throw Error(ErrorCode::InvalidSpec, "output_stride must be >= 1");
    const double step = effective_dt();
    if (step > cfl_limit())
        throw Error(ErrorCode::CflViolation, "dt = " + std::to_string(step) + " s exceeds the CFL limit " +
                                                 std::to_string(cfl_limit()) + " s");
}

SWEState SWEState::rest(const SWEParams& params)
{
    SWEState s;
    s.eta = Matrix::Zero(params.ny, params.nx);
    s.u = Matrix::Zero(params.ny, params.nx + 1);
    s.v = Matrix::Zero(params.ny + 1, params.nx);
    return s;
}

SWEState swe_gaussian_bump(const SWEParams& params, double amplitude, double center_x, double center_y, double width)
{
    if (!(width > 0.0)) throw Error(ErrorCode::InvalidSpec, "bump width must be positive");
    SWEState s = SWEState::rest(params);
    const double dx = params.dx();
    const double dy = params.dy();
    const double denom = 2.0 * width * width;
    for (Index j = 0; j < params.ny; ++j) {
        const double y = (static_cast<double>(j) + 0.5) * dy - center_y;
        for (Index i = 0; i < params.nx; ++i) {
            const double x = (static_cast<double>(i) + 0.5) * dx - center_x;
            s.eta(j, i) = amplitude * std::exp(-(x * x + y * y) / denom);
        }
    }
    return s;
}

namespace {

struct Workspace {
    Matrix u_star, v_star, u_pred, v_pred;
};

double coriolis_at(const SWEParams& p, double y)
{
    return p.f0 + p.beta * (y - 0.5 * p.ly);
}

// v averaged onto the interior u-face (j, i): the four surrounding v points.
double v_on_u(const Matrix& v, Index j, Index i)
{
    return 0.25 * (v(j, i - 1) + v(j, i) + v(j + 1, i - 1) + v(j + 1, i));
}

double u_on_v(const Matrix& u, Index j, Index i)
{
    return 0.25 * (u(j - 1, i) + u(j - 1, i + 1) + u(j, i) + u(j, i + 1));
}

void swe_step_with(const SWEParams& p, SWEState& s, Workspace& w)
{
    const Index nx = p.nx;
    const Index ny = p.ny;
    const double dt = p.effective_dt();
    const double dx = p.dx();
    const double dy = p.dy();
    const double g = p.gravity;

    // Pressure gradient, friction and wind: forward Euler.
    w.u_star = s.u;
    w.v_star = s.v;
    for (Index j = 0; j < ny; ++j)
        for (Index i = 1; i < nx; ++i) {
            const double h = 0.5 * (s.eta(j, i - 1) + s.eta(j, i)) + p.depth;
            w.u_star(j, i) = s.u(j, i) - dt * g * (s.eta(j, i) - s.eta(j, i - 1)) / dx - dt * p.friction * s.u(j, i) +
                             dt * p.tau_x / (p.rho0 * h);
        }
    for (Index j = 1; j < ny; ++j)
        for (Index i = 0; i < nx; ++i) {
            const double h = 0.5 * (s.eta(j - 1, i) + s.eta(j, i)) + p.depth;
            w.v_star(j, i) = s.v(j, i) - dt * g * (s.eta(j, i) - s.eta(j - 1, i)) / dy - dt * p.friction * s.v(j, i) +
                             dt * p.tau_y / (p.rho0 * h);
        }

    // Coriolis: predictor, then trapezoidal corrector.
    w.u_pred = w.u_star;
    w.v_pred = w.v_star;
    for (Index j = 0; j < ny; ++j) {
        const double f = coriolis_at(p, (static_cast<double>(j) + 0.5) * dy);
        for (Index i = 1; i < nx; ++i) w.u_pred(j, i) = w.u_star(j, i) + dt * f * v_on_u(w.v_star, j, i);
    }
    for (Index j = 1; j < ny; ++j) {
        const double f = coriolis_at(p, static_cast<double>(j) * dy);
        for (Index i = 0; i < nx; ++i) w.v_pred(j, i) = w.v_star(j, i) - dt * f * u_on_v(w.u_star, j, i);
    }
    for (Index j = 0; j < ny; ++j) {
        const double f = coriolis_at(p, (static_cast<double>(j) + 0.5) * dy);
        for (Index i = 1; i < nx; ++i)
            s.u(j, i) = w.u_star(j, i) + 0.5 * dt * f * (v_on_u(w.v_star, j, i) + v_on_u(w.v_pred, j, i));
    }
    for (Index j = 1; j < ny; ++j) {
        const double f = coriolis_at(p, static_cast<double>(j) * dy);
        for (Index i = 0; i < nx; ++i)
            s.v(j, i) = w.v_star(j, i) - 0.5 * dt * f * (u_on_v(w.u_star, j, i) + u_on_v(w.u_pred, j, i));
    }

    // Continuity in flux form with upwinded total depth. Wall fluxes vanish
    // because the wall velocities are never written.
    Matrix& eta = s.eta;
    Matrix flux_x = Matrix::Zero(ny, nx + 1);
    Matrix flux_y = Matrix::Zero(ny + 1, nx);
    for (Index j = 0; j < ny; ++j)
        for (Index i = 1; i < nx; ++i) {
            const double u = s.u(j, i);
            const double h = (u >= 0.0 ? eta(j, i - 1) : eta(j, i)) + p.depth;
            flux_x(j, i) = u * h;
        }
    for (Index j = 1; j < ny; ++j)
        for (Index i = 0; i < nx; ++i) {
            const double v = s.v(j, i);
            const double h = (v >= 0.0 ? eta(j - 1, i) : eta(j, i)) + p.depth;
            flux_y(j, i) = v * h;
        }
    const double src = p.source - p.w_vert;
    for (Index j = 0; j < ny; ++j)
        for (Index i = 0; i < nx; ++i)
            eta(j, i) -= dt * ((flux_x(j, i + 1) - flux_x(j, i)) / dx + (flux_y(j + 1, i) - flux_y(j, i)) / dy) - dt * src;
}

void emit(const SWEParams& p, const SWEState& s, RowMatrix& out, Index row)
{
    const Index cells = p.nx * p.ny;
    for (Index j = 0; j < p.ny; ++j)
        for (Index i = 0; i < p.nx; ++i) {
            const Index c = j * p.nx + i;
            out(row, c) = s.eta(j, i);
            if (p.include_velocity) {
                out(row, cells + c) = 0.5 * (s.u(j, i) + s.u(j, i + 1));
                out(row, 2 * cells + c) = 0.5 * (s.v(j, i) + s.v(j + 1, i));
            }
        }
}

}  // namespace

void swe_step(const SWEParams& params, SWEState& state)
{
    Workspace w;
    swe_step_with(params, state, w);
}

SeriesData swe_simulate(const SWEParams& params, const SWEState& init)
{
    params.validate();
    if (init.eta.rows() != params.ny || init.eta.cols() != params.nx || init.u.rows() != params.ny ||
        init.u.cols() != params.nx + 1 || init.v.rows() != params.ny + 1 || init.v.cols() != params.nx)
        throw Error(ErrorCode::DimensionMismatch, "initial state does not match the grid");

    const Index cells = params.nx * params.ny;
    const Index rows = 1 + params.n_steps / params.output_stride;
    SeriesData out;
    out.values.resize(rows, params.include_velocity ? 3 * cells : cells);
    out.dt = params.effective_dt() * static_cast<double>(params.output_stride);
    if (!params.include_velocity) out.shape = FieldShape{params.ny, params.nx};

    SWEState s = init;
    s.u.col(0).setZero();
    s.u.col(params.nx).setZero();
    s.v.row(0).setZero();
    s.v.row(params.ny).setZero();
    Workspace w;
    emit(params, s, out.values, 0);
    Index row = 1;
    for (Index step = 1; step <= params.n_steps; ++step) {
        swe_step_with(params, s, w);
        if (step % params.output_stride == 0) {
            if (!s.eta.allFinite() || !s.u.allFinite() || !s.v.allFinite())
                throw Error(ErrorCode::NonFiniteState, "shallow-water state diverged at step " + std::to_string(step));
            emit(params, s, out.values, row++);
        }
    }
    return out;
}

}  // namespace seqrc
