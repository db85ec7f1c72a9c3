#ifndef FHQ_ORACLE_HPP
#define FHQ_ORACLE_HPP

#include "fhq/allocation.hpp"

#include <vector>

namespace fhq {

inline constexpr int kOracleMaxStreams = 4;
inline constexpr int kOracleMaxBits = 16;
inline constexpr int kDefaultPowerGrid = 40;

bool oracle_guard_holds(std::size_t streams, int bit_budget);

/// Every composition of bit_budget into r nonnegative parts, lexicographic.
std::vector<std::vector<int>> bit_compositions(int bit_budget, int streams);

/// Exhaustive search over integer bit vectors. For each one the power is the
/// better of quantized water-filling and a simplex grid with the given
/// resolution. Compositions are scored in parallel and reduced in
/// enumeration order.
StreamAllocation brute_force_alloc(const AllocationProblem& problem, int power_grid_resolution = kDefaultPowerGrid,
                                   const SolverSettings& settings = {});

/// Same search, single-threaded.
StreamAllocation brute_force_alloc_serial(const AllocationProblem& problem,
                                          int power_grid_resolution = kDefaultPowerGrid,
                                          const SolverSettings& settings = {});

}  // namespace fhq

#endif  // FHQ_ORACLE_HPP
