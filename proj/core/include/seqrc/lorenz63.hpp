#pragma once

#include "seqrc/series.hpp"

#include <array>

namespace seqrc {

struct Lorenz63Params {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    std::array<double, 3> initial{17.67715816276679, 12.931379185960404, 43.91404334248268};
    double dt = 0.01;
    /// Rows emitted; row 0 is the state after `discard` steps.
    Index n_steps = 1;
    /// Integration steps run before the first emitted row.
    Index discard = 0;

    /// The default `initial` values taken as (sigma, rho, beta) instead.
    /// Starts from (1, 1, 1).
    static Lorenz63Params literal_parameter_reading();

    void validate() const;
};

/// Right-hand side of the Lorenz63 system.
std::array<double, 3> lorenz63_rhs(const std::array<double, 3>& s, double sigma, double rho, double beta) noexcept;

/// Classical RK4 at step dt. Throws NonFiniteState when the trajectory blows up.
SeriesData lorenz63_generate(const Lorenz63Params& params);

}  // namespace seqrc
