#include "fhq/oracle.hpp"

#include <cstdint>
#include <exception>
#include <functional>

namespace fhq {
namespace {

void compose(int remaining, int slot, std::vector<int>& current, std::vector<std::vector<int>>& out) {
    const int last = static_cast<int>(current.size()) - 1;
    if (slot == last) {
        current[static_cast<std::size_t>(slot)] = remaining;
        out.push_back(current);
        return;
    }
    for (int b = remaining; b >= 0; --b) {
        current[static_cast<std::size_t>(slot)] = b;
        compose(remaining - b, slot + 1, current, out);
    }
}

struct Scored {
    double rate = -1.0;
    std::vector<double> powers;
};

double rate_of(std::span<const double> powers, std::span<const double> s, std::span<const double> betas,
               double noise_var) {
    double total = 0.0;
    for (std::size_t i = 0; i < powers.size(); ++i) total += stream_rate(powers[i], s[i], noise_var, betas[i]);
    return total;
}

// Walks every p = power * k / resolution with sum k = resolution.
void scan_grid(std::span<const double> s, std::span<const double> betas, double power, double noise_var,
               int resolution, Scored& best) {
    const std::size_t r = s.size();
    std::vector<int> k(r, 0);
    std::vector<double> p(r, 0.0);
    std::function<void(std::size_t, int)> walk = [&](std::size_t slot, int left) {
        if (slot + 1 == r) {
            k[slot] = left;
            for (std::size_t i = 0; i < r; ++i) p[i] = power * k[i] / resolution;
            const double rate = rate_of(p, s, betas, noise_var);
            if (rate > best.rate) best = {rate, p};
            return;
        }
        for (int v = left; v >= 0; --v) {
            k[slot] = v;
            walk(slot + 1, left - v);
        }
    };
    walk(0, resolution);
}

Scored score(const AllocationProblem& problem, const std::vector<int>& bits, int resolution,
             const SolverSettings& settings) {
    const std::span<const double> s(problem.singulars);
    std::vector<double> betas(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) betas[i] = problem.model(bits[i]);

    Scored best;
    best.powers = quantized_water_fill(s, problem.noise_var, betas, problem.power, settings);
    best.rate = rate_of(best.powers, s, betas, problem.noise_var);
    scan_grid(s, betas, problem.power, problem.noise_var, resolution, best);
    return best;
}

void check_guard(const AllocationProblem& problem, int resolution) {
    validate(problem);
    if (!oracle_guard_holds(problem.singulars.size(), problem.bit_budget))
        throw std::invalid_argument("brute_force_alloc: needs r <= " + std::to_string(kOracleMaxStreams) +
                                    " and b_tot <= " + std::to_string(kOracleMaxBits));
    if (resolution < 1) throw std::invalid_argument("brute_force_alloc: power grid resolution must be >= 1");
}

StreamAllocation pick(const AllocationProblem& problem, const std::vector<std::vector<int>>& comps,
                      const std::vector<Scored>& scores) {
    std::size_t arg = 0;
    for (std::size_t c = 1; c < scores.size(); ++c)
        if (scores[c].rate > scores[arg].rate) arg = c;
    auto out = make_allocation(scores[arg].powers, comps[arg], problem.singulars, problem.noise_var, problem.model);
    out.stats.power_solves = static_cast<int>(comps.size());
    return out;
}

}  // namespace

bool oracle_guard_holds(std::size_t streams, int bit_budget) {
    return streams >= 1 && streams <= static_cast<std::size_t>(kOracleMaxStreams) && bit_budget >= 0 &&
           bit_budget <= kOracleMaxBits;
}

std::vector<std::vector<int>> bit_compositions(int bit_budget, int streams) {
    if (streams < 1 || bit_budget < 0) throw std::invalid_argument("bit_compositions: invalid arguments");
    std::vector<std::vector<int>> out;
    std::vector<int> current(static_cast<std::size_t>(streams), 0);
    compose(bit_budget, 0, current, out);
    return out;
}

StreamAllocation brute_force_alloc(const AllocationProblem& problem, int resolution, const SolverSettings& settings) {
    check_guard(problem, resolution);
    const auto comps = bit_compositions(problem.bit_budget, static_cast<int>(problem.singulars.size()));
    std::vector<Scored> scores(comps.size());
    const auto count = static_cast<std::int64_t>(comps.size());
    std::vector<std::exception_ptr> errors(comps.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < count; ++c) {
        const auto idx = static_cast<std::size_t>(c);
        try {
            scores[idx] = score(problem, comps[idx], resolution, settings);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return pick(problem, comps, scores);
}

StreamAllocation brute_force_alloc_serial(const AllocationProblem& problem, int resolution,
                                          const SolverSettings& settings) {
    check_guard(problem, resolution);
    const auto comps = bit_compositions(problem.bit_budget, static_cast<int>(problem.singulars.size()));
    std::vector<Scored> scores;
    scores.reserve(comps.size());
    for (const auto& bits : comps) scores.push_back(score(problem, bits, resolution, settings));
    return pick(problem, comps, scores);
}

}  // namespace fhq
