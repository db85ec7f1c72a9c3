#include "fhq/simulation.hpp"

#include "fhq/format.hpp"
#include "fhq/rng.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>

namespace fhq {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<Scheme> canonical(std::vector<Scheme> schemes) {
    std::sort(schemes.begin(), schemes.end());
    schemes.erase(std::unique(schemes.begin(), schemes.end()), schemes.end());
    return schemes;
}

int max_rank(const SweepConfig& c) { return std::min(c.m, c.k); }

AllocationProblem problem_for(const SweepConfig& c, std::vector<double> singulars, int bits) {
    AllocationProblem p;
    p.singulars = std::move(singulars);
    p.power = c.power;
    p.noise_var = c.noise_var;
    p.bit_budget = bits;
    return p;
}

StreamAllocation allocate(Scheme scheme, const AllocationProblem& p, int oracle_grid) {
    switch (scheme) {
        case Scheme::JBP: return jbp_alloc(p);
        case Scheme::UB: return ub_alloc(p);
        case Scheme::Greedy: return greedy_alloc(p);
        case Scheme::UnawareWF: return unaware_wf_alloc(p);
        case Scheme::Oracle: return brute_force_alloc(p, oracle_grid);
        case Scheme::Ideal: break;
    }
    throw std::logic_error("allocate: Ideal has no quantized allocation");
}

// Outcome of one channel realization, laid out [scheme][budget].
struct Outcome {
    std::vector<double> rate, active, ms;
};

Outcome evaluate_realization(const SweepConfig& c, const std::vector<Scheme>& schemes, int j) {
    using clock = std::chrono::steady_clock;
    const std::size_t nb = c.bit_budgets.size();
    Outcome out;
    out.rate.assign(schemes.size() * nb, 0.0);
    out.active.assign(schemes.size() * nb, 0.0);
    out.ms.assign(schemes.size() * nb, 0.0);

    const std::vector<double> s = realization_singulars(c, j);
    auto elapsed_ms = [&](clock::time_point t0) {
        return c.record_timing ? std::chrono::duration<double, std::milli>(clock::now() - t0).count() : 0.0;
    };

    for (std::size_t si = 0; si < schemes.size(); ++si) {
        if (schemes[si] == Scheme::Ideal) {
            const auto t0 = clock::now();
            const auto powers = water_fill(s, c.power, c.noise_var);
            const double rate = ideal_rate(powers, s, c.noise_var);
            const double ms = elapsed_ms(t0);
            const auto active = static_cast<double>(std::count_if(powers.begin(), powers.end(), [](double p) { return p > 0.0; }));
            for (std::size_t bi = 0; bi < nb; ++bi) {
                out.rate[si * nb + bi] = rate;
                out.active[si * nb + bi] = active;
                out.ms[si * nb + bi] = ms;
            }
            continue;
        }
        for (std::size_t bi = 0; bi < nb; ++bi) {
            const auto problem = problem_for(c, s, c.bit_budgets[bi]);
            const auto t0 = clock::now();
            const auto alloc = allocate(schemes[si], problem, c.oracle_grid);
            out.ms[si * nb + bi] = elapsed_ms(t0);
            out.rate[si * nb + bi] = alloc.sum_rate;
            out.active[si * nb + bi] = alloc.active_count;
        }
    }
    return out;
}

SweepResult aggregate(const SweepConfig& c, const std::vector<Scheme>& schemes, const std::vector<Outcome>& outcomes) {
    SweepResult res;
    res.kappa_db = c.kappa_db;
    res.snr_db = c.snr_db;
    res.realizations = c.realizations;
    res.schemes = schemes;
    res.bit_budgets = c.bit_budgets;
    const std::size_t nb = c.bit_budgets.size();
    const auto n = static_cast<std::size_t>(c.realizations);
    res.per_realization.resize(schemes.size() * nb * n);

    for (std::size_t bi = 0; bi < nb; ++bi) {
        for (std::size_t si = 0; si < schemes.size(); ++si) {
            const std::size_t cell = si * nb + bi;
            double rate_sum = 0.0, active_sum = 0.0, ms_sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double r = outcomes[j].rate[cell];
                res.per_realization[cell * n + j] = r;
                rate_sum += r;
                active_sum += outcomes[j].active[cell];
                ms_sum += outcomes[j].ms[cell];
            }
            SweepRow row;
            row.scheme = schemes[si];
            row.bit_budget = c.bit_budgets[bi];
            row.mean_sum_rate = rate_sum / n;
            row.mean_active_streams = active_sum / n;
            row.mean_ms = ms_sum / n;
            if (n > 1) {
                double ss = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double d = outcomes[j].rate[cell] - row.mean_sum_rate;
                    ss += d * d;
                }
                row.std_sum_rate = std::sqrt(ss / static_cast<double>(n - 1));
            }
            res.rows.push_back(row);
        }
    }
    return res;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

std::string fixed(double v, int decimals) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    return ec == std::errc{} ? std::string(buf, end) : std::string("?");
}

}  // namespace

std::string_view scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::Ideal: return "Ideal";
        case Scheme::JBP: return "JBP";
        case Scheme::UB: return "UB";
        case Scheme::Greedy: return "Greedy";
        case Scheme::UnawareWF: return "UnawareWF";
        case Scheme::Oracle: return "Oracle";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view text) {
    const std::string t = lower(trim(text));
    if (t == "ideal") return Scheme::Ideal;
    if (t == "jbp" || t == "jbp-alloc") return Scheme::JBP;
    if (t == "ub" || t == "ub-alloc") return Scheme::UB;
    if (t == "greedy") return Scheme::Greedy;
    if (t == "unawarewf" || t == "unaware" || t == "unaware-wf") return Scheme::UnawareWF;
    if (t == "oracle" || t == "brute-force") return Scheme::Oracle;
    return std::nullopt;
}

void validate(const SweepConfig& c) {
    auto fail = [](const std::string& key, const std::string& why) {
        throw std::invalid_argument("config key '" + key + "': " + why);
    };
    if (c.m < 1) fail("m", "must be >= 1");
    if (c.k < 1) fail("k", "must be >= 1");
    if (!std::isfinite(c.kappa_db)) fail("kappa_db", "must be finite");
    if (!std::isfinite(c.snr_db)) fail("snr_db", "must be finite");
    if (!(c.power > 0.0) || !std::isfinite(c.power)) fail("power", "must be > 0");
    if (!(c.noise_var > 0.0) || !std::isfinite(c.noise_var)) fail("noise_var", "must be > 0");
    if (c.bit_budgets.empty()) fail("bit_budgets", "must not be empty");
    for (std::size_t i = 0; i < c.bit_budgets.size(); ++i) {
        if (c.bit_budgets[i] < 0) fail("bit_budgets", "must be nonnegative");
        if (i > 0 && c.bit_budgets[i] <= c.bit_budgets[i - 1]) fail("bit_budgets", "must be strictly ascending");
    }
    if (c.realizations < 1) fail("realizations", "must be >= 1");
    if (c.schemes.empty()) fail("schemes", "must name at least one scheme");
    if (c.nlos_paths < 1) fail("nlos_paths", "must be >= 1");
    if (!(c.antenna_spacing > 0.0)) fail("antenna_spacing", "must be > 0");
    if (c.oracle_grid < 1) fail("oracle_grid", "must be >= 1");
    if (std::find(c.schemes.begin(), c.schemes.end(), Scheme::Oracle) != c.schemes.end() &&
        !oracle_guard_holds(static_cast<std::size_t>(max_rank(c)), c.bit_budgets.back()))
        fail("schemes", "Oracle requires min(m, k) <= " + std::to_string(kOracleMaxStreams) +
                            " and every b_tot <= " + std::to_string(kOracleMaxBits));
}

std::vector<double> realization_singulars(const SweepConfig& c, int realization) {
    RicianConfig rc;
    rc.m = c.m;
    rc.k = c.k;
    rc.kappa = db_to_linear(c.kappa_db);
    rc.nlos_paths = c.nlos_paths;
    rc.antenna_spacing = c.antenna_spacing;
    const auto channel = generate_rician(rc, derive_seed(c.master_seed, static_cast<std::uint64_t>(realization)));
    return scale_to_snr(channel.singulars, c.power, c.noise_var, db_to_linear(c.snr_db), c.m, c.k);
}

const SweepRow* SweepResult::find(Scheme scheme, int bit_budget) const {
    for (const auto& row : rows)
        if (row.scheme == scheme && row.bit_budget == bit_budget) return &row;
    return nullptr;
}

SweepResult run_sweep(const SweepConfig& config) {
    validate(config);
    const auto schemes = canonical(config.schemes);
    const int n = config.realizations;
    std::vector<Outcome> outcomes(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < n; ++j) {
        try {
            outcomes[static_cast<std::size_t>(j)] = evaluate_realization(config, schemes, j);
        } catch (...) {
            errors[static_cast<std::size_t>(j)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return aggregate(config, schemes, outcomes);
}

SweepResult run_sweep_serial(const SweepConfig& config) {
    validate(config);
    const auto schemes = canonical(config.schemes);
    std::vector<Outcome> outcomes;
    outcomes.reserve(static_cast<std::size_t>(config.realizations));
    for (int j = 0; j < config.realizations; ++j) outcomes.push_back(evaluate_realization(config, schemes, j));
    return aggregate(config, schemes, outcomes);
}

std::string summarize(const SweepResult& result) {
    if (result.rows.empty()) throw std::invalid_argument("summarize: empty result");
    std::vector<SweepRow> rows = result.rows;
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return a.bit_budget != b.bit_budget ? a.bit_budget < b.bit_budget : a.scheme < b.scheme;
    });

    std::string out = pad("b_tot", 7) + pad("scheme", 11) + pad("mean_rate", 13) + pad("std_rate", 11) +
                      pad("active", 9) + pad("ms", 11) + pad("frac_ideal", 12) + '\n';
    for (const auto& row : rows) {
        const SweepRow* ideal = result.find(Scheme::Ideal, row.bit_budget);
        const std::string frac =
            ideal && ideal->mean_sum_rate > 0.0 ? fixed(row.mean_sum_rate / ideal->mean_sum_rate, 4) : "-";
        out += pad(std::to_string(row.bit_budget), 7) + pad(std::string(scheme_name(row.scheme)), 11) +
               pad(fixed(row.mean_sum_rate, 4), 13) + pad(fixed(row.std_sum_rate, 4), 11) +
               pad(fixed(row.mean_active_streams, 2), 9) + pad(fixed(row.mean_ms, 3), 11) + pad(frac, 12) + '\n';
    }
    return out;
}

OracleCheckReport oracle_check(const SweepConfig& config, double slack) {
    SweepConfig c = config;
    c.schemes = {Scheme::Oracle, Scheme::JBP, Scheme::UB, Scheme::Greedy, Scheme::UnawareWF};
    c.record_timing = false;
    const SweepResult res = run_sweep(c);

    OracleCheckReport report;
    const auto oracle_idx = static_cast<std::size_t>(
        std::find(res.schemes.begin(), res.schemes.end(), Scheme::Oracle) - res.schemes.begin());
    for (std::size_t si = 0; si < res.schemes.size(); ++si) {
        if (si == oracle_idx) continue;
        OracleCheckReport::Entry e{res.schemes[si]};
        e.worst_shortfall = -std::numeric_limits<double>::infinity();
        double ratio_sum = 0.0;
        int ratio_count = 0;
        for (std::size_t bi = 0; bi < res.bit_budgets.size(); ++bi) {
            for (std::size_t j = 0; j < static_cast<std::size_t>(res.realizations); ++j) {
                const double h = res.rate(si, bi, j), o = res.rate(oracle_idx, bi, j);
                e.worst_shortfall = std::max(e.worst_shortfall, h - o);
                if (o > 0.0) {
                    ratio_sum += h / o;
                    ++ratio_count;
                }
                ++e.instances;
            }
        }
        e.mean_ratio = ratio_count ? ratio_sum / ratio_count : 1.0;
        if (e.worst_shortfall > slack) report.dominance_holds = false;
        report.entries.push_back(e);
    }
    return report;
}

}  // namespace fhq
