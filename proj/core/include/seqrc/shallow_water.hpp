#pragma once

// Rotating shallow-water model on an Arakawa C-grid with closed walls.

#include "seqrc/series.hpp"

namespace seqrc {

struct SWEParams {
    Index nx = 64;
    Index ny = 64;
    double lx = 1e6;
    double ly = 1e6;
    double gravity = 9.81;
    double depth = 100.0;
    double f0 = 1e-4;
    double beta = 2e-11;
    double friction = 0.0;
    double tau_x = 0.0;
    double tau_y = 0.0;
    double rho0 = 1024.0;
    double source = 0.0;
    double w_vert = 0.0;
    /// Seconds per step; 0 picks cfl_fraction of the gravity-wave limit.
    double dt = 0.0;
    double cfl_fraction = 0.5;
    Index n_steps = 1000;
    /// Steps between emitted snapshots.
    Index output_stride = 10;
    /// Append cell-centred u and v after eta (D = 3 nx ny).
    bool include_velocity = false;

    double dx() const noexcept { return lx / static_cast<double>(nx); }
    double dy() const noexcept { return ly / static_cast<double>(ny); }
    /// min(dx, dy) / sqrt(g H)
    double cfl_limit() const noexcept;
    double effective_dt() const noexcept;
    void validate() const;
};

/// eta at cell centres (ny x nx), u on x-faces (ny x nx+1), v on y-faces
/// (ny+1 x nx). Wall faces of u and v stay zero.
struct SWEState {
    Matrix eta;
    Matrix u;
    Matrix v;

    static SWEState rest(const SWEParams& params);
};

SWEState swe_gaussian_bump(const SWEParams& params, double amplitude, double center_x, double center_y,
                           double width);

/// One time step in place.
void swe_step(const SWEParams& params, SWEState& state);

/// Row 0 is the initial state, then one row every output_stride steps.
SeriesData swe_simulate(const SWEParams& params, const SWEState& init);

}  // namespace seqrc
