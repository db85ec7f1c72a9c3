#include "fhq/cli.hpp"

#include "fhq/format.hpp"
#include "fhq/oracle.hpp"
#include "fhq/quantizer.hpp"
#include "fhq/simulation.hpp"
#include "fhq/sweep_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace fhq {
namespace {

template <typename T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_floating_point_v<T>)
            out += format_number(v[i]);
        else
            out += std::to_string(v[i]);
    }
    return out;
}

std::string cplx(std::complex<double> z) { return format_number(z.real()) + ',' + format_number(z.imag()); }

std::vector<double> parse_singulars(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(',', start);
        const auto item = trim(std::string_view(text).substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        auto v = parse_number(item);
        if (!v) throw std::invalid_argument("--singulars: bad number '" + std::string(item) + "'");
        out.push_back(*v);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

struct Options {
    int bits = 0;
    double tolerance = LloydSettings{}.tolerance;
    int max_iterations = LloydSettings{}.max_iterations;

    double snr_db = 0.0;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    bool serial = false;

    std::string singulars;
    double power = 1.0;
    double noise = 1.0;
    std::string scheme = "jbp";
    int grid = kDefaultPowerGrid;

    std::string config;
    std::string output;
};

int design_quantizer(const Options& o, std::ostream& out) {
    const auto cb = design_lloyd_max(o.bits, {o.tolerance, o.max_iterations});
    out << format_codebook(cb);
    return 0;
}

int validate_bussgang(const Options& o, std::ostream& out) {
    const auto cb = design_lloyd_max(o.bits);
    BussgangSetup setup;
    setup.signal_power = 1.0;
    setup.channel = 1.0;
    setup.noise_var = 1.0 / db_to_linear(o.snr_db);
    setup.sample_count = o.samples;
    setup.seed = o.seed;
    const auto r = o.serial ? bussgang_check_serial(cb, setup) : bussgang_check(cb, setup);
    out << "bits " << cb.bits << '\n'
        << "distortion " << format_number(cb.distortion) << '\n'
        << "expected_gain " << format_number(1.0 - cb.distortion) << '\n'
        << "estimated_gain " << cplx(r.estimated_gain) << '\n'
        << "gain_error " << format_number(std::abs(r.estimated_gain - (1.0 - cb.distortion))) << '\n'
        << "cross_correlation_x_eta " << cplx(r.cross_correlation_x_eta) << '\n'
        << "cross_correlation_y_eta " << cplx(r.cross_correlation_y_eta) << '\n'
        << "output_power_ratio " << format_number(r.output_power_ratio) << '\n'
        << "samples " << r.sample_count << '\n';
    return 0;
}

int allocate_cmd(const Options& o, std::ostream& out, std::ostream& err) {
    AllocationProblem p;
    p.singulars = parse_singulars(o.singulars);
    p.power = o.power;
    p.noise_var = o.noise;
    p.bit_budget = o.bits;
    validate(p);
    const auto scheme = parse_scheme(o.scheme);
    if (!scheme) throw std::invalid_argument("--scheme: unknown scheme '" + o.scheme + "'");

    if (*scheme == Scheme::Ideal) {
        const auto powers = water_fill(p.singulars, p.power, p.noise_var);
        out << "scheme Ideal\npowers " << join(powers) << "\nsum_rate "
            << format_number(ideal_rate(powers, p.singulars, p.noise_var)) << '\n';
        return 0;
    }

    StreamAllocation a;
    switch (*scheme) {
        case Scheme::JBP: a = jbp_alloc(p); break;
        case Scheme::UB: a = ub_alloc(p); break;
        case Scheme::Greedy: a = greedy_alloc(p); break;
        case Scheme::UnawareWF: a = unaware_wf_alloc(p); break;
        case Scheme::Oracle: a = brute_force_alloc(p, o.grid); break;
        case Scheme::Ideal: break;
    }
    out << "scheme " << scheme_name(*scheme) << '\n'
        << "powers " << join(a.powers) << '\n'
        << "bits " << join(a.bits) << '\n'
        << "distortions " << join(a.distortions) << '\n'
        << "stream_rates " << join(a.stream_rates) << '\n'
        << "sum_rate " << format_number(a.sum_rate) << '\n'
        << "active_streams " << a.active_count << '\n'
        << "total_power " << format_number(a.total_power()) << '\n'
        << "total_bits " << a.total_bits() << '\n'
        << "power_solves " << a.stats.power_solves << '\n'
        << "bit_solves " << a.stats.bit_solves << '\n';

    if (a.total_bits() != p.bit_budget || std::abs(a.total_power() - p.power) > 1e-8 * p.power) {
        err << "error: allocation violates its budgets\n";
        return 3;
    }
    return 0;
}

int sweep_cmd(const Options& o, std::ostream& out) {
    const auto config = load_config(o.config);
    const auto result = o.serial ? run_sweep_serial(config) : run_sweep(config);
    if (o.output.empty()) {
        out << to_csv(result);
    } else {
        write_csv(result, o.output);
        out << summarize(result);
    }
    return 0;
}

int oracle_check_cmd(const Options& o, std::ostream& out, std::ostream& err) {
    const auto config = load_config(o.config);
    const auto report = oracle_check(config);
    out << "scheme,instances,worst_shortfall,mean_ratio_to_oracle\n";
    for (const auto& e : report.entries)
        out << scheme_name(e.scheme) << ',' << e.instances << ',' << format_number(e.worst_shortfall) << ','
            << format_number(e.mean_ratio) << '\n';
    if (!report.dominance_holds) {
        err << "error: a heuristic exceeded the exhaustive optimum\n";
        return 4;
    }
    return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fronthaul-quantized MIMO bit and power allocation"};
    app.name("fhq");
    app.require_subcommand(1, 1);
    Options o;

    auto* design = app.add_subcommand("design-quantizer", "Design a Lloyd-Max quantizer for N(0,1)");
    design->add_option("--bits", o.bits, "Bits per real dimension")->required()->check(CLI::Range(1, kMaxDesignBits));
    design->add_option("--tolerance", o.tolerance, "Relative distortion change to stop at")->check(CLI::PositiveNumber);
    design->add_option("--max-iterations", o.max_iterations, "Lloyd iteration cap")->check(CLI::PositiveNumber);

    auto* bussgang = app.add_subcommand("validate-bussgang", "Monte-Carlo check of the Bussgang identities");
    bussgang->add_option("--bits", o.bits, "Quantizer bits")->required()->check(CLI::Range(1, kMaxDesignBits));
    bussgang->add_option("--snr-db", o.snr_db, "P |h|^2 / noise in dB (P = 1, h = 1)");
    bussgang->add_option("--samples", o.samples, "Number of complex samples")->check(CLI::PositiveNumber);
    bussgang->add_option("--seed", o.seed, "RNG seed");
    bussgang->add_flag("--serial", o.serial, "Use the single-threaded reference");

    auto* alloc = app.add_subcommand("allocate", "Allocate bits and power for one channel");
    alloc->add_option("--singulars", o.singulars, "Descending singular values, comma separated")->required();
    alloc->add_option("--power", o.power, "Total transmit power")->check(CLI::PositiveNumber);
    alloc->add_option("--noise", o.noise, "Noise variance")->check(CLI::PositiveNumber);
    alloc->add_option("--bits", o.bits, "Total fronthaul bits")->required()->check(CLI::NonNegativeNumber);
    alloc->add_option("--scheme", o.scheme, "jbp | ub | greedy | unaware | oracle | ideal");
    alloc->add_option("--grid", o.grid, "Oracle power grid resolution")->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sum-rate sweep over bit budgets");
    sweep->add_option("--config", o.config, "key = value config file")->required();
    sweep->add_option("--output", o.output, "CSV output path (stdout when omitted)");
    sweep->add_flag("--serial", o.serial, "Use the single-threaded reference");

    auto* oracle = app.add_subcommand("oracle-check", "Compare heuristics against the exhaustive optimum");
    oracle->add_option("--config", o.config, "key = value config file (small instances only)")->required();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*design) return design_quantizer(o, out);
        if (*bussgang) return validate_bussgang(o, out);
        if (*alloc) return allocate_cmd(o, out, err);
        if (*sweep) return sweep_cmd(o, out);
        if (*oracle) return oracle_check_cmd(o, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace fhq
