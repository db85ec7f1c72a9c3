#ifndef FHQ_SWEEP_IO_HPP
#define FHQ_SWEEP_IO_HPP

#include "fhq/simulation.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fhq {

inline constexpr std::string_view kCsvHeader =
    "scheme,b_tot,kappa_db,snr_db,mean_sum_rate,std_sum_rate,mean_active_streams,mean_ms";

/// Flat `key = value` text, one key per line, `#` starts a comment. Keys are
/// the SweepConfig field names. Lists are comma separated; bit_budgets also
/// accepts `start:stop:step`. Unknown or malformed keys throw
/// std::invalid_argument naming the key.
SweepConfig parse_config(std::string_view text);
SweepConfig load_config(const std::filesystem::path& path);
std::string format_config(const SweepConfig& config);

struct CsvRow {
    std::string scheme;
    int b_tot = 0;
    double kappa_db = 0.0;
    double snr_db = 0.0;
    double mean_sum_rate = 0.0;
    double std_sum_rate = 0.0;
    double mean_active_streams = 0.0;
    double mean_ms = 0.0;
};

std::string to_csv(const SweepResult& result);
std::vector<CsvRow> parse_csv(std::string_view text);
void write_csv(const SweepResult& result, const std::filesystem::path& path);

}  // namespace fhq

#endif  // FHQ_SWEEP_IO_HPP
