#ifndef FHQ_SIMULATION_HPP
#define FHQ_SIMULATION_HPP

#include "fhq/allocation.hpp"
#include "fhq/channel.hpp"
#include "fhq/oracle.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fhq {

enum class Scheme { Ideal, JBP, UB, Greedy, UnawareWF, Oracle };

inline constexpr Scheme kAllSchemes[] = {Scheme::Ideal, Scheme::JBP,       Scheme::UB,
                                         Scheme::Greedy, Scheme::UnawareWF, Scheme::Oracle};

std::string_view scheme_name(Scheme scheme);
/// Case-insensitive; accepts the canonical names plus short aliases
/// (jbp, ub, greedy, unaware, ideal, oracle).
std::optional<Scheme> parse_scheme(std::string_view text);

struct SweepConfig {
    int m = 128;
    int k = 16;
    double kappa_db = 0.0;
    double snr_db = 10.0;
    double power = 1.0;
    double noise_var = 1.0;
    std::vector<int> bit_budgets = {16, 32, 48, 64, 80, 96, 112, 128, 144, 160};
    int realizations = 100;
    std::uint64_t master_seed = 0;
    std::vector<Scheme> schemes = {Scheme::Ideal, Scheme::JBP, Scheme::UB, Scheme::Greedy, Scheme::UnawareWF};
    int nlos_paths = 200;
    double antenna_spacing = 0.5;
    bool record_timing = true;  // false writes mean_ms = 0 so output is reproducible byte for byte
    int oracle_grid = kDefaultPowerGrid;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const SweepConfig& config);

/// Channel of realization j, scaled to the configured SNR.
std::vector<double> realization_singulars(const SweepConfig& config, int realization);

struct SweepRow {
    Scheme scheme = Scheme::Ideal;
    int bit_budget = 0;
    double mean_sum_rate = 0.0;
    double std_sum_rate = 0.0;
    double mean_active_streams = 0.0;
    double mean_ms = 0.0;
};

struct SweepResult {
    double kappa_db = 0.0;
    double snr_db = 0.0;
    int realizations = 0;
    std::vector<Scheme> schemes;   // canonical order, deduplicated
    std::vector<int> bit_budgets;
    std::vector<SweepRow> rows;    // ordered by (b_tot, scheme)
    std::vector<double> per_realization;  // [scheme][budget][realization]

    double rate(std::size_t scheme_index, std::size_t budget_index, std::size_t realization) const {
        return per_realization[(scheme_index * bit_budgets.size() + budget_index) * realizations + realization];
    }
    const SweepRow* find(Scheme scheme, int bit_budget) const;
};

/// Evaluates every (realization, b_tot, scheme). Realizations run in
/// parallel; results are reduced in realization order.
SweepResult run_sweep(const SweepConfig& config);
SweepResult run_sweep_serial(const SweepConfig& config);

/// Fixed-width table sorted by (b_tot, scheme) with each scheme's mean as a
/// fraction of Ideal when Ideal is present.
std::string summarize(const SweepResult& result);

/// Per-instance comparison of the exhaustive oracle against every heuristic.
struct OracleCheckReport {
    struct Entry {
        Scheme scheme;
        double worst_shortfall = 0.0;  // max over instances of heuristic - oracle
        double mean_ratio = 0.0;       // heuristic / oracle, averaged
        int instances = 0;
    };
    std::vector<Entry> entries;
    bool dominance_holds = true;
};
OracleCheckReport oracle_check(const SweepConfig& config, double slack = 1e-9);

}  // namespace fhq

#endif  // FHQ_SIMULATION_HPP
