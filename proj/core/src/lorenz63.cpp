#include "seqrc/lorenz63.hpp"

#include "seqrc/error.hpp"

#include <cmath>

namespace seqrc {

Lorenz63Params Lorenz63Params::literal_parameter_reading()
{
    Lorenz63Params p;
    p.sigma = 17.67715816276679;
    p.rho = 12.931379185960404;
    p.beta = 43.91404334248268;
    p.initial = {1.0, 1.0, 1.0};
    return p;
}

void Lorenz63Params::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidSpec, "lorenz63 dt must be > 0");
    if (n_steps < 1) throw Error(ErrorCode::InvalidSpec, "lorenz63 n_steps must be >= 1");
    if (discard < 0) throw Error(ErrorCode::InvalidSpec, "lorenz63 discard must be >= 0");
}

std::array<double, 3> lorenz63_rhs(const std::array<double, 3>& s, double sigma, double rho, double beta) noexcept
{
    return {sigma * (s[1] - s[0]), s[0] * (rho - s[2]) - s[1], s[0] * s[1] - beta * s[2]};
}

SeriesData lorenz63_generate(const Lorenz63Params& params)
{
    params.validate();
    const double h = params.dt;
    auto advance = [&](std::array<double, 3>& s) {
        auto axpy = [](const std::array<double, 3>& a, double w, const std::array<double, 3>& b) {
            return std::array<double, 3>{a[0] + w * b[0], a[1] + w * b[1], a[2] + w * b[2]};
        };
        const auto k1 = lorenz63_rhs(s, params.sigma, params.rho, params.beta);
        const auto k2 = lorenz63_rhs(axpy(s, 0.5 * h, k1), params.sigma, params.rho, params.beta);
        const auto k3 = lorenz63_rhs(axpy(s, 0.5 * h, k2), params.sigma, params.rho, params.beta);
        const auto k4 = lorenz63_rhs(axpy(s, h, k3), params.sigma, params.rho, params.beta);
        for (int i = 0; i < 3; ++i) s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || !std::isfinite(s[2]))
            throw Error(ErrorCode::NonFiniteState, "lorenz63 trajectory diverged");
    };

    std::array<double, 3> state = params.initial;
    for (Index i = 0; i < params.discard; ++i) advance(state);

    SeriesData out;
    out.values.resize(params.n_steps, 3);
    out.dt = params.dt;
    out.labels = {"x", "y", "z"};
    for (Index t = 0; t < params.n_steps; ++t) {
        if (t > 0) advance(state);
        out.values.row(t) << state[0], state[1], state[2];
    }
    return out;
}

}  // namespace seqrc
