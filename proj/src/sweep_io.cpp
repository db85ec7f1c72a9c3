#include "fhq/sweep_io.hpp"

#include "fhq/format.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fhq {
namespace {

[[noreturn]] void bad_key(std::string_view key, const std::string& why) {
    throw std::invalid_argument("config key '" + std::string(key) + "': " + why);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename Int>
Int need_int(std::string_view key, std::string_view value) {
    auto v = parse_integer<Int>(value);
    if (!v) bad_key(key, "expected an integer, got '" + std::string(value) + "'");
    return *v;
}

double need_real(std::string_view key, std::string_view value) {
    auto v = parse_number(value);
    if (!v) bad_key(key, "expected a number, got '" + std::string(value) + "'");
    return *v;
}

bool need_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    bad_key(key, "expected true or false, got '" + std::string(value) + "'");
}

std::vector<int> need_budgets(std::string_view key, std::string_view value) {
    std::vector<int> out;
    if (value.find(':') != std::string_view::npos) {
        const auto parts = split(value, ':');
        if (parts.size() != 3) bad_key(key, "range must be start:stop:step");
        const int start = need_int<int>(key, parts[0]), stop = need_int<int>(key, parts[1]),
                  step = need_int<int>(key, parts[2]);
        if (step <= 0) bad_key(key, "range step must be > 0");
        for (int b = start; b <= stop; b += step) out.push_back(b);
    } else {
        for (auto item : split(value, ',')) out.push_back(need_int<int>(key, item));
    }
    return out;
}

std::vector<Scheme> need_schemes(std::string_view key, std::string_view value) {
    std::vector<Scheme> out;
    for (auto item : split(value, ',')) {
        auto s = parse_scheme(item);
        if (!s) bad_key(key, "unknown scheme '" + std::string(item) + "'");
        out.push_back(*s);
    }
    return out;
}

std::string join_budgets(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

}  // namespace

SweepConfig parse_config(std::string_view text) {
    using Setter = std::function<void(SweepConfig&, std::string_view, std::string_view)>;
    static const std::map<std::string, Setter, std::less<>> setters = {
        {"m", [](SweepConfig& c, auto k, auto v) { c.m = need_int<int>(k, v); }},
        {"k", [](SweepConfig& c, auto k, auto v) { c.k = need_int<int>(k, v); }},
        {"kappa_db", [](SweepConfig& c, auto k, auto v) { c.kappa_db = need_real(k, v); }},
        {"snr_db", [](SweepConfig& c, auto k, auto v) { c.snr_db = need_real(k, v); }},
        {"power", [](SweepConfig& c, auto k, auto v) { c.power = need_real(k, v); }},
        {"noise_var", [](SweepConfig& c, auto k, auto v) { c.noise_var = need_real(k, v); }},
        {"bit_budgets", [](SweepConfig& c, auto k, auto v) { c.bit_budgets = need_budgets(k, v); }},
        {"realizations", [](SweepConfig& c, auto k, auto v) { c.realizations = need_int<int>(k, v); }},
        {"master_seed", [](SweepConfig& c, auto k, auto v) { c.master_seed = need_int<std::uint64_t>(k, v); }},
        {"schemes", [](SweepConfig& c, auto k, auto v) { c.schemes = need_schemes(k, v); }},
        {"nlos_paths", [](SweepConfig& c, auto k, auto v) { c.nlos_paths = need_int<int>(k, v); }},
        {"antenna_spacing", [](SweepConfig& c, auto k, auto v) { c.antenna_spacing = need_real(k, v); }},
        {"record_timing", [](SweepConfig& c, auto k, auto v) { c.record_timing = need_bool(k, v); }},
        {"oracle_grid", [](SweepConfig& c, auto k, auto v) { c.oracle_grid = need_int<int>(k, v); }},
    };

    SweepConfig config;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) bad_key(key, "unknown key");
        if (value.empty()) bad_key(key, "missing value");
        it->second(config, key, value);
    }
    validate(config);
    return config;
}

SweepConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config not found: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string format_config(const SweepConfig& c) {
    std::string schemes;
    for (std::size_t i = 0; i < c.schemes.size(); ++i) schemes += (i ? "," : "") + std::string(scheme_name(c.schemes[i]));
    return "m = " + std::to_string(c.m) + "\nk = " + std::to_string(c.k) + "\nkappa_db = " + format_number(c.kappa_db) +
           "\nsnr_db = " + format_number(c.snr_db) + "\npower = " + format_number(c.power) +
           "\nnoise_var = " + format_number(c.noise_var) + "\nbit_budgets = " + join_budgets(c.bit_budgets) +
           "\nrealizations = " + std::to_string(c.realizations) + "\nmaster_seed = " + std::to_string(c.master_seed) +
           "\nschemes = " + schemes + "\nnlos_paths = " + std::to_string(c.nlos_paths) +
           "\nantenna_spacing = " + format_number(c.antenna_spacing) +
           "\nrecord_timing = " + (c.record_timing ? "true" : "false") +
           "\noracle_grid = " + std::to_string(c.oracle_grid) + '\n';
}

std::string to_csv(const SweepResult& result) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& row : result.rows) {
        out += std::string(scheme_name(row.scheme)) + ',' + std::to_string(row.bit_budget) + ',' +
               format_number(result.kappa_db) + ',' + format_number(result.snr_db) + ',' +
               format_number(row.mean_sum_rate) + ',' + format_number(row.std_sum_rate) + ',' +
               format_number(row.mean_active_streams) + ',' + format_number(row.mean_ms) + '\n';
    }
    return out;
}

std::vector<CsvRow> parse_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvHeader) throw std::invalid_argument("csv: unexpected header");
    std::vector<CsvRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split(trim(line), ',');
        auto real = [&](std::size_t i) {
            auto v = parse_number(f[i]);
            if (!v) throw std::invalid_argument("csv line " + std::to_string(line_no) + ": bad number");
            return *v;
        };
        if (f.size() != 8) throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected 8 fields");
        auto b = parse_integer<int>(f[1]);
        if (!b) throw std::invalid_argument("csv line " + std::to_string(line_no) + ": bad b_tot");
        rows.push_back({std::string(f[0]), *b, real(2), real(3), real(4), real(5), real(6), real(7)});
    }
    return rows;
}

void write_csv(const SweepResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << to_csv(result);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace fhq
