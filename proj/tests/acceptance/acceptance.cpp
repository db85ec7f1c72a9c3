#include "fhq/allocation.hpp"
#include "fhq/channel.hpp"
#include "fhq/oracle.hpp"
#include "fhq/quantizer.hpp"
#include "fhq/rng.hpp"
#include "fhq/simulation.hpp"
#include "fhq/sweep_io.hpp"

#include "gauss_quadrature.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fhq;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(const char* name, double limit_s, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = seconds_since(start);
    const bool in_time = elapsed < limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s %s: %s; %.2f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", name, o.detail.c_str(), elapsed,
                limit_s);
    std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
    return buf;
}

std::string bits_text(const std::vector<int>& bits) {
    std::string out = "[";
    for (std::size_t i = 0; i < bits.size(); ++i) out += (i ? "," : "") + std::to_string(bits[i]);
    return out + "]";
}

AllocationProblem make_problem(std::vector<double> s, double power, double noise, int bits) {
    AllocationProblem p;
    p.singulars = std::move(s);
    p.power = power;
    p.noise_var = noise;
    p.bit_budget = bits;
    return p;
}

Outcome distortion_factors() {
    double worst = 0.0;
    for (int b = 1; b <= 5; ++b) {
        const double mine = design_lloyd_max(b).distortion;
        const double ref = testing::reference_lloyd(b).distortion;
        worst = std::max(worst, std::abs(mine - ref));
    }
    const double one_bit = std::abs(design_lloyd_max(1).distortion - (1.0 - 2.0 / std::numbers::pi));
    return {worst < 1e-4 && one_bit < 1e-10,
            fmt("max |beta - quadrature reference| = %.2e over b=1..5, |beta(1) - (1 - 2/pi)| = %.2e", worst, one_bit)};
}

Outcome bussgang_identities() {
    Outcome o;
    for (int b : {1, 3, 5}) {
        const auto cb = design_lloyd_max(b);
        BussgangSetup setup;
        setup.signal_power = 1.0;
        setup.noise_var = 1.0;
        setup.sample_count = 1'000'000;
        setup.seed = derive_seed(2024, static_cast<std::uint64_t>(b));
        const auto r = bussgang_check(cb, setup);
        const double gain_err = std::abs(r.estimated_gain - std::complex<double>(1.0 - cb.distortion, 0.0));
        const double xcorr = std::abs(r.cross_correlation_x_eta);
        const double power_err = std::abs(r.output_power_ratio - 1.0);
        o.pass = o.pass && gain_err < 0.005 && xcorr < 0.01 && power_err < 0.01;
        o.detail += (o.detail.empty() ? "" : "; ") +
                    fmt("b=%.0f gain err %.1e, |rho(x,eta)| %.1e, power ratio err %.1e", b, gain_err, xcorr, power_err);
    }
    return o;
}

Outcome oracle_equivalence() {
    RicianConfig ch;
    ch.m = 3;
    ch.k = 3;
    ch.kappa = 1.0;
    double worst_jbp = 1.0, worst_greedy = 1.0, gap_sum = 0.0, jbp_sum = 0.0, greedy_sum = 0.0;
    int count = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const auto raw = generate_rician(ch, derive_seed(77, static_cast<std::uint64_t>(inst))).singulars;
        for (double snr_db : {0.0, 10.0, 20.0}) {
            const auto s = scale_to_snr(raw, 1.0, 1.0, db_to_linear(snr_db), ch.m, ch.k);
            for (int b : {6, 9, 12}) {
                const auto p = make_problem(s, 1.0, 1.0, b);
                const double best = brute_force_alloc(p).sum_rate;
                const double jbp = jbp_alloc(p).sum_rate;
                const double greedy = greedy_alloc(p).sum_rate;
                worst_jbp = std::min(worst_jbp, jbp / best);
                worst_greedy = std::min(worst_greedy, greedy / best);
                jbp_sum += jbp / best;
                greedy_sum += greedy / best;
                gap_sum += std::abs(greedy - jbp) / jbp;
                ++count;
            }
        }
    }
    const double mean_gap = gap_sum / count;
    return {worst_jbp >= 0.97 && worst_greedy >= 0.97 && mean_gap <= 0.02,
            fmt("%.0f problems: worst JBP/oracle %.4f, worst Greedy/oracle %.4f, mean |Greedy-JBP|/JBP %.4f", count,
                worst_jbp, worst_greedy, mean_gap) +
                fmt(" (mean JBP/oracle %.4f, mean Greedy/oracle %.4f)", jbp_sum / count, greedy_sum / count)};
}

Outcome kkt_residuals() {
    Engine engine(derive_seed(4, 0));
    std::uniform_int_distribution<int> r_u(1, 16), b_u(0, 12);
    std::uniform_real_distribution<double> lg(-2.0, 2.0), ls(-1.5, 1.5);
    const auto& model = DistortionModel::lloyd_max();
    double classical = 0.0, quantized = 0.0;
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> s(static_cast<std::size_t>(r_u(engine)));
        for (double& v : s) v = std::pow(10.0, ls(engine));
        std::sort(s.begin(), s.end(), std::greater<>());
        const double power = std::pow(10.0, lg(engine)), noise = std::pow(10.0, lg(engine));

        const auto wf = water_fill_level(s, power, noise);
        double total = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double floor = noise / (s[i] * s[i]);
            total += wf.powers[i];
            if (wf.powers[i] > 0.0)
                classical = std::max(classical, std::abs(wf.powers[i] + floor - wf.level) / wf.level);
            else
                classical = std::max(classical, std::max(0.0, wf.level - floor) / wf.level);
        }
        classical = std::max(classical, std::abs(total - power) / power);

        std::vector<double> betas(s.size());
        for (double& b : betas) b = model(b_u(engine));
        const auto q = quantized_water_fill(s, noise, betas, power);
        std::vector<double> slopes;
        total = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            total += q[i];
            if (q[i] > 0.0) slopes.push_back(g_prime(q[i] * s[i] * s[i] / noise, betas[i]) * s[i] * s[i] / noise);
        }
        quantized = std::max(quantized, std::abs(total - power) / power);
        if (slopes.empty()) continue;
        const double level = std::accumulate(slopes.begin(), slopes.end(), 0.0) / slopes.size();
        for (double k : slopes) quantized = std::max(quantized, std::abs(k - level) / level);
        for (std::size_t i = 0; i < s.size(); ++i)
            if (q[i] == 0.0)
                quantized = std::max(quantized, std::max(0.0, g_prime(0.0, betas[i]) * s[i] * s[i] / noise - level) / level);
    }
    return {classical < 1e-8 && quantized < 1e-6,
            fmt("1000 instances: max classical residual %.2e, max quantized residual %.2e", classical, quantized)};
}

Outcome high_snr_uniformity() {
    // Three equal streams at 40 dB per-antenna SNR with M = K = 3.
    const auto s = scale_to_snr(std::vector<double>(3, 1.0), 1.0, 1.0, db_to_linear(40.0), 3, 3);
    const auto p = make_problem(s, 1.0, 1.0, 12);
    const auto best = brute_force_alloc(p);
    bool near_uniform = true;
    for (int b : best.bits) near_uniform = near_uniform && std::abs(b - 4) <= 1;
    const double jbp = jbp_alloc(p).sum_rate;
    const double ub = ub_alloc(p).sum_rate;
    const double ub_gap = std::abs(ub - jbp) / jbp;
    const double uniform_rate =
        make_allocation(quantized_water_fill(s, 1.0, std::vector<double>(3, p.model(4)), 1.0), {4, 4, 4}, s, 1.0, p.model)
            .sum_rate;
    return {near_uniform && ub_gap <= 0.01,
            "oracle bits " + bits_text(best.bits) + fmt(" (rate %.4f vs %.4f for [4,4,4]), |UB-JBP|/JBP %.2e",
                                                        best.sum_rate, uniform_rate, ub_gap)};
}

SweepResult sweep(double kappa_db, std::vector<int> budgets, std::vector<Scheme> schemes) {
    SweepConfig c;
    c.m = 128;
    c.k = 16;
    c.kappa_db = kappa_db;
    c.snr_db = 10.0;
    c.realizations = 100;
    c.master_seed = 1;
    c.bit_budgets = std::move(budgets);
    c.schemes = std::move(schemes);
    c.record_timing = false;
    return run_sweep(c);
}

Outcome rayleigh_sweep() {
    const auto r = sweep(0.0, SweepConfig{}.bit_budgets, {Scheme::JBP, Scheme::UB, Scheme::UnawareWF});
    double max_loss = 0.0, max_ub_gap = 0.0;
    int loss_at = 0;
    for (int b : r.bit_budgets) {
        const double jbp = r.find(Scheme::JBP, b)->mean_sum_rate;
        const double loss = 1.0 - r.find(Scheme::UnawareWF, b)->mean_sum_rate / jbp;
        if (loss > max_loss) max_loss = loss, loss_at = b;
        max_ub_gap = std::max(max_ub_gap, std::abs(r.find(Scheme::UB, b)->mean_sum_rate - jbp) / jbp);
    }
    return {max_loss >= 0.10 && max_ub_gap <= 0.02,
            fmt("kappa 0 dB: max UnawareWF loss %.1f%% at b_tot=%.0f, max |UB-JBP|/JBP %.2f%%", 100.0 * max_loss,
                loss_at, 100.0 * max_ub_gap)};
}

Outcome rician_sweep() {
    auto budgets = SweepConfig{}.bit_budgets;
    budgets.push_back(100);
    std::sort(budgets.begin(), budgets.end());
    const auto r = sweep(20.0, budgets, {Scheme::Ideal, Scheme::JBP, Scheme::UnawareWF});
    const double frac = r.find(Scheme::JBP, 100)->mean_sum_rate / r.find(Scheme::Ideal, 100)->mean_sum_rate;
    bool below = true;
    double min_margin = 1e300;
    for (int b : r.bit_budgets) {
        const double margin = r.find(Scheme::JBP, b)->mean_sum_rate - r.find(Scheme::UnawareWF, b)->mean_sum_rate;
        below = below && margin > 0.0;
        min_margin = std::min(min_margin, margin);
    }
    return {frac >= 0.98 && below,
            fmt("kappa 20 dB: JBP/Ideal at b_tot=100 is %.4f, min JBP - UnawareWF margin %.2e bit/s/Hz", frac,
                min_margin)};
}

Outcome complexity() {
    SweepConfig c;
    const auto s = realization_singulars(c, 0);
    const int r = static_cast<int>(s.size());
    const auto p = make_problem(s, c.power, c.noise_var, 160);

    const auto time_best_of = [](int reps, const std::function<StreamAllocation()>& f, StreamAllocation& out) {
        double best = 1e300;
        for (int i = 0; i < reps; ++i) {
            const auto start = Clock::now();
            out = f();
            best = std::min(best, seconds_since(start));
        }
        return best;
    };
    StreamAllocation jbp, greedy;
    const double t_jbp = time_best_of(20, [&] { return jbp_alloc(p); }, jbp);
    const double t_greedy = time_best_of(3, [&] { return greedy_alloc(p); }, greedy);

    bool counts = jbp.stats.total() == 2 * r && jbp.stats.power_solves == r && greedy.stats.power_solves == 160 * r;
    for (int b : {16, 48, 96}) {
        const auto q = make_problem(s, c.power, c.noise_var, b);
        counts = counts && jbp_alloc(q).stats.total() == 2 * r && greedy_alloc(q).stats.power_solves == b * r;
    }
    const double ratio = t_greedy / t_jbp;
    return {counts && ratio >= 5.0,
            fmt("r=%.0f: JBP %.0f solves, Greedy %.0f power solves; wall clock Greedy/JBP = %.0fx", r,
                jbp.stats.total(), greedy.stats.power_solves, ratio)};
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Outcome determinism() {
    SweepConfig c;
    c.m = 32;
    c.k = 8;
    c.kappa_db = 5.0;
    c.bit_budgets = {8, 16, 32, 64};
    c.realizations = 24;
    c.master_seed = 99;
    c.record_timing = false;
    const auto dir = std::filesystem::temp_directory_path();
    const auto a = dir / "fhq_acceptance_a.csv";
    const auto b = dir / "fhq_acceptance_b.csv";
    const auto s = dir / "fhq_acceptance_serial.csv";

    const int threads = omp_get_max_threads();
    omp_set_num_threads(4);
    write_csv(run_sweep(c), a);
    omp_set_num_threads(3);
    write_csv(run_sweep(c), b);
    omp_set_num_threads(threads);
    write_csv(run_sweep_serial(c), s);

    const auto ta = read_file(a), tb = read_file(b), ts = read_file(s);
    for (const auto& f : {a, b, s}) std::filesystem::remove(f);
    const bool same = !ta.empty() && ta == tb && ta == ts;
    return {same, fmt("%.0f-byte CSV from 4-thread, 3-thread and serial runs", static_cast<double>(ta.size())) +
                      (same ? " identical" : " differ")};
}

}  // namespace

int main() {
    report("distortion_factors", 1.0, distortion_factors);
    report("bussgang_identities", 10.0, bussgang_identities);
    report("oracle_equivalence", 120.0, oracle_equivalence);
    report("water_filling_kkt", 10.0, kkt_residuals);
    report("high_snr_uniformity", 30.0, high_snr_uniformity);
    report("rayleigh_sweep", 300.0, rayleigh_sweep);
    report("rician_sweep", 300.0, rician_sweep);
    report("complexity", 120.0, complexity);
    report("determinism", 120.0, determinism);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
