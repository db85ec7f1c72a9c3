#ifndef FHQ_RATE_MODEL_HPP
#define FHQ_RATE_MODEL_HPP

#include "fhq/quantizer.hpp"

#include <span>
#include <vector>

namespace fhq {

/// Counts of the iterative sub-solves an allocation scheme performed.
struct SolveStats {
    int power_solves = 0;  // water-filling (classical or quantization-aware)
    int bit_solves = 0;    // continuous bit water-level solves

    int total() const { return power_solves + bit_solves; }
};

/// Per-stream powers, integer bits and resulting rates of one allocation.
/// All sequences have the same length (the number of streams considered).
struct StreamAllocation {
    std::vector<double> powers;
    std::vector<int> bits;
    std::vector<double> distortions;
    std::vector<double> stream_rates;
    double sum_rate = 0.0;
    int active_count = 0;  // streams with p_i > 0 and b_i > 0
    SolveStats stats;

    std::size_t size() const { return powers.size(); }
    int total_bits() const;
    double total_power() const;
};

/// Achievable rate of one quantized stream in bits per channel use:
/// log2(1 + (1 - beta) p s^2 / (beta p s^2 + noise_var)).
double stream_rate(double power, double singular, double noise_var, double beta);

/// Sum of stream_rate over the allocation's streams against the leading singulars.
double sum_rate(const StreamAllocation& alloc, std::span<const double> singulars, double noise_var);

/// Unquantized rate, sum of log2(1 + p_i s_i^2 / noise_var).
double ideal_rate(std::span<const double> powers, std::span<const double> singulars, double noise_var);

/// Fills distortions, stream rates, sum rate and active count from powers and bits.
StreamAllocation make_allocation(std::vector<double> powers, std::vector<int> bits,
                                 std::span<const double> singulars, double noise_var,
                                 const DistortionModel& model);

}  // namespace fhq

#endif  // FHQ_RATE_MODEL_HPP
