#pragma once

#include "seqrc/reservoir.hpp"

#include <cstdint>
#include <string>

namespace seqrc {

struct ParameterCount {
    std::uint64_t trainable = 0;
    /// W_x plus every W_r counted dense, independent of sparsity.
    std::uint64_t fixed = 0;
};

/// Analytic size and cost of one model, derived from its spec alone.
struct CostReport {
    ParameterCount parameters;
    /// One forward step with a multiply-accumulate counted as one operation.
    std::uint64_t flops = 0;
    /// 8 bytes x (fixed + trainable + state + feature).
    std::uint64_t memory_bytes = 0;
    std::uint64_t state_size = 0;
    std::uint64_t feature_size = 0;
};

/// Readout output dimension defaults to the input dimension.
ParameterCount count_parameters(const ModelSpec& spec, Index output_dim = -1);
std::uint64_t estimate_flops(const ModelSpec& spec, Index output_dim = -1);
std::uint64_t estimate_memory(const ModelSpec& spec, Index output_dim = -1);
CostReport cost_report(const ModelSpec& spec, Index output_dim = -1);

/// Multi-line human-readable summary.
std::string format_cost_report(const ModelSpec& spec, const CostReport& report);

}  // namespace seqrc
