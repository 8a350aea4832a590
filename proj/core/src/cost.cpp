#include "seqrc/cost.hpp"

#include <sstream>

namespace seqrc {

namespace {

struct Dims {
    std::uint64_t d, n_layers, n_layer, state, features, d_out;
};

Dims dims_of(const ModelSpec& spec, Index output_dim)
{
    validate(spec);
    Dims x{};
    x.d = static_cast<std::uint64_t>(input_dim_of(spec));
    x.n_layers = static_cast<std::uint64_t>(layer_count_of(spec));
    x.n_layer = static_cast<std::uint64_t>(layer_size_of(spec));
    x.state = x.n_layers * x.n_layer;
    x.features = 1 + x.d + x.state;
    x.d_out = output_dim < 0 ? x.d : static_cast<std::uint64_t>(output_dim);
    return x;
}

}  // namespace

ParameterCount count_parameters(const ModelSpec& spec, Index output_dim)
{
    const Dims x = dims_of(spec, output_dim);
    ParameterCount c;
    c.trainable = x.features * x.d_out;
    c.fixed = x.d * x.n_layer + x.n_layers * x.n_layer * x.n_layer;
    return c;
}

std::uint64_t estimate_flops(const ModelSpec& spec, Index output_dim)
{
    // Each layer's W_r r product is computed once and shared with the next layer.
    const Dims x = dims_of(spec, output_dim);
    return x.d * x.n_layer + x.n_layers * x.n_layer * x.n_layer + x.features * x.d_out;
}

std::uint64_t estimate_memory(const ModelSpec& spec, Index output_dim)
{
    const Dims x = dims_of(spec, output_dim);
    const ParameterCount c = count_parameters(spec, output_dim);
    return 8 * (c.fixed + c.trainable + x.state + x.features);
}

CostReport cost_report(const ModelSpec& spec, Index output_dim)
{
    const Dims x = dims_of(spec, output_dim);
    CostReport r;
    r.parameters = count_parameters(spec, output_dim);
    r.flops = estimate_flops(spec, output_dim);
    r.memory_bytes = estimate_memory(spec, output_dim);
    r.state_size = x.state;
    r.feature_size = x.features;
    return r;
}

std::string format_cost_report(const ModelSpec& spec, const CostReport& report)
{
    std::ostringstream out;
    if (kind_of(spec) == ModelKind::single)
        out << "model            RC(D=" << input_dim_of(spec) << ", N=" << layer_size_of(spec) << ")\n";
    else
        out << "model            SeqRC(D=" << input_dim_of(spec) << ", " << layer_count_of(spec) << "x"
            << layer_size_of(spec) << ")\n";
    out << "trainable        " << report.parameters.trainable << '\n'
        << "fixed            " << report.parameters.fixed << '\n'
        << "flops_per_step   " << report.flops << '\n'
        << "mflops_per_step  " << static_cast<double>(report.flops) / 1e6 << '\n'
        << "memory_bytes     " << report.memory_bytes << '\n'
        << "state_size       " << report.state_size << '\n'
        << "feature_size     " << report.feature_size << '\n';
    return out.str();
}

}  // namespace seqrc
