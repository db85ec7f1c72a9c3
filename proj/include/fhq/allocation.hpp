#ifndef FHQ_ALLOCATION_HPP
#define FHQ_ALLOCATION_HPP

#include "fhq/quantizer.hpp"
#include "fhq/rate_model.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fhq {

/// Joint bit/power allocation instance over r parallel streams.
struct AllocationProblem {
    std::vector<double> singulars;  // descending, > 0
    double power = 1.0;
    double noise_var = 1.0;
    int bit_budget = 0;
    DistortionModel model = DistortionModel::lloyd_max();
};

struct SolverSettings {
    double bisection_tolerance = 1e-10;  // relative residual of the power budget
    int max_bisection_iterations = 200;
    double bracket_growth_factor = 2.0;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void validate(const AllocationProblem& problem);

/// Classical water-filling p_i = max(0, level - noise_var / s_i^2), sum p_i = power.
/// Solved exactly over the active prefix of streams ordered by gain.
struct WaterFilling {
    std::vector<double> powers;
    double level = 0.0;
};
WaterFilling water_fill_level(std::span<const double> singulars, double power, double noise_var);
std::vector<double> water_fill(std::span<const double> singulars, double power, double noise_var);

/// Continuous bit levels b_i = max(0, mu + log2(sqrt(p_i s_i^2))) with sum b_i = bit_budget.
/// mu is found exactly by scanning active sets sorted by p_i s_i^2.
std::vector<double> bit_waterlevel(std::span<const double> powers, std::span<const double> singulars, int bit_budget);

/// Rounds continuous bits to the nearest integers, then moves one bit at a
/// time (smallest exact rate loss on removal, largest exact gain on
/// addition, ties to the lower index) until the sum equals bit_budget.
std::vector<int> round_and_fix(std::span<const double> real_bits, int bit_budget, std::span<const double> powers,
                               std::span<const double> singulars, double noise_var, const DistortionModel& model);

/// Derivative of g(x) = log2(1 + (1 - beta) x / (beta x + 1)).
double g_prime(double x, double beta);

/// Unique x >= 0 with g'(x) = y; 0 when y >= g'(0).
double g_prime_inverse(double y, double beta);

/// Power allocation maximizing sum_i g_i(p_i s_i^2 / noise_var) for fixed
/// distortions. Bisects the multiplier until the power budget holds; streams
/// with beta = 1 get nothing. If every beta is 1 the objective is identically
/// zero and all power goes to stream 0.
std::vector<double> quantized_water_fill(std::span<const double> singulars, double noise_var,
                                         std::span<const double> betas, double power,
                                         const SolverSettings& settings = {});

/// JBP-Alloc: water-fill over the r' strongest streams, continuous bit
/// levels, rounding with greedy repair; best of r' = 1..r (ties to smaller r').
StreamAllocation jbp_alloc(const AllocationProblem& problem, const SolverSettings& settings = {});

/// Uniform bits over the r' strongest streams (remainder to the strongest),
/// quantization-aware power, one redistribution pass for streams left without power.
StreamAllocation ub_alloc(const AllocationProblem& problem, const SolverSettings& settings = {});

/// Adds bits one at a time to whichever stream maximizes the sum rate after
/// re-solving quantization-aware power. Performs bit_budget * r power solves.
StreamAllocation greedy_alloc(const AllocationProblem& problem, const SolverSettings& settings = {});

/// Classical water-filling powers; bits uniform over streams with power.
StreamAllocation unaware_wf_alloc(const AllocationProblem& problem, const SolverSettings& settings = {});

/// Bit vector with bit_budget spread as evenly as possible over `active`
/// (ascending stream indices); leftover bits go to the first entries.
std::vector<int> uniform_bits(std::size_t streams, std::span<const std::size_t> active, int bit_budget);

}  // namespace fhq

#endif  // FHQ_ALLOCATION_HPP
