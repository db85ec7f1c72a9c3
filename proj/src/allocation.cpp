#include "fhq/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace fhq {
namespace {

std::vector<double> betas_for(std::span<const int> bits, const DistortionModel& model) {
    std::vector<double> out(bits.size());
    std::transform(bits.begin(), bits.end(), out.begin(), [&](int b) { return model(b); });
    return out;
}

double bit_rate(double power, double singular, double noise_var, const DistortionModel& model, int bits) {
    return stream_rate(power, singular, noise_var, model(bits));
}

std::vector<double> padded(std::vector<double> v, std::size_t n) {
    v.resize(n, 0.0);
    return v;
}

std::vector<int> padded(std::vector<int> v, std::size_t n) {
    v.resize(n, 0);
    return v;
}

}  // namespace

void validate(const AllocationProblem& p) {
    if (p.singulars.empty()) throw std::invalid_argument("allocation: no streams (rank 0)");
    for (std::size_t i = 0; i < p.singulars.size(); ++i) {
        if (!(p.singulars[i] > 0.0) || !std::isfinite(p.singulars[i]))
            throw std::invalid_argument("allocation: singular values must be finite and > 0");
        if (i > 0 && p.singulars[i] > p.singulars[i - 1])
            throw std::invalid_argument("allocation: singular values must be descending");
    }
    if (!(p.power > 0.0) || !std::isfinite(p.power)) throw std::invalid_argument("allocation: power budget must be > 0");
    if (!(p.noise_var > 0.0) || !std::isfinite(p.noise_var))
        throw std::invalid_argument("allocation: noise variance must be > 0");
    if (p.bit_budget < 0) throw std::invalid_argument("allocation: bit budget must be >= 0");
}

WaterFilling water_fill_level(std::span<const double> singulars, double power, double noise_var) {
    if (singulars.empty()) throw std::invalid_argument("water_fill: no streams");
    if (!(power > 0.0) || !(noise_var > 0.0)) throw std::invalid_argument("water_fill: power and noise must be > 0");

    const std::size_t n = singulars.size();
    std::vector<double> floor(n);
    for (std::size_t i = 0; i < n; ++i)
        floor[i] = singulars[i] > 0.0 ? noise_var / (singulars[i] * singulars[i]) : std::numeric_limits<double>::infinity();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return floor[a] < floor[b]; });
    if (std::isinf(floor[order[0]])) throw std::invalid_argument("water_fill: all stream gains are zero");

    // Largest prefix whose water level clears its weakest member's floor.
    double level = power + floor[order[0]];
    double floor_sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        floor_sum += floor[order[k - 1]];
        const double candidate = (power + floor_sum) / static_cast<double>(k);
        if (!(candidate > floor[order[k - 1]])) break;
        level = candidate;
    }

    WaterFilling out{std::vector<double>(n, 0.0), level};
    for (std::size_t i = 0; i < n; ++i) out.powers[i] = std::max(0.0, level - floor[i]);
    return out;
}

std::vector<double> water_fill(std::span<const double> singulars, double power, double noise_var) {
    return water_fill_level(singulars, power, noise_var).powers;
}

std::vector<double> bit_waterlevel(std::span<const double> powers, std::span<const double> singulars, int bit_budget) {
    if (powers.size() > singulars.size()) throw std::invalid_argument("bit_waterlevel: more powers than streams");
    if (bit_budget < 0) throw std::invalid_argument("bit_waterlevel: negative bit budget");
    const std::size_t n = powers.size();

    std::vector<double> offset(n, -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) {
        if (powers[i] < 0.0) throw std::invalid_argument("bit_waterlevel: negative power");
        const double strength = powers[i] * singulars[i] * singulars[i];
        if (strength > 0.0) {
            offset[i] = 0.5 * std::log2(strength);
            order.push_back(i);
        }
    }
    if (order.empty()) throw std::invalid_argument("bit_waterlevel: every stream has zero p_i s_i^2");
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return offset[a] > offset[b]; });

    std::vector<double> bits(n, 0.0);
    if (bit_budget == 0) return bits;

    // The budget function sum max(0, mu + a_i) is piecewise linear in mu;
    // take the largest active set whose weakest member stays positive.
    double mu = bit_budget - offset[order[0]];
    double offset_sum = 0.0;
    for (std::size_t k = 1; k <= order.size(); ++k) {
        offset_sum += offset[order[k - 1]];
        const double candidate = (bit_budget - offset_sum) / static_cast<double>(k);
        if (!(candidate + offset[order[k - 1]] > 0.0)) break;
        mu = candidate;
    }
    for (std::size_t i : order) bits[i] = std::max(0.0, mu + offset[i]);
    return bits;
}

std::vector<int> round_and_fix(std::span<const double> real_bits, int bit_budget, std::span<const double> powers,
                               std::span<const double> singulars, double noise_var, const DistortionModel& model) {
    if (bit_budget < 0) throw std::invalid_argument("round_and_fix: negative bit budget");
    const std::size_t n = real_bits.size();
    if (powers.size() != n || singulars.size() < n)
        throw std::invalid_argument("round_and_fix: length mismatch");
    if (n == 0) {
        if (bit_budget != 0) throw std::invalid_argument("round_and_fix: bits to place but no streams");
        return {};
    }

    std::vector<int> bits(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(real_bits[i] >= 0.0) || !std::isfinite(real_bits[i]))
            throw std::invalid_argument("round_and_fix: bit levels must be finite and >= 0");
        bits[i] = static_cast<int>(std::lround(real_bits[i]));
    }

    int surplus = std::accumulate(bits.begin(), bits.end(), 0) - bit_budget;
    auto rate = [&](std::size_t i, int b) { return bit_rate(powers[i], singulars[i], noise_var, model, b); };

    while (surplus > 0) {
        std::size_t pick = n;
        double best_loss = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (bits[i] == 0) continue;
            const double loss = rate(i, bits[i]) - rate(i, bits[i] - 1);
            if (loss < best_loss) {
                best_loss = loss;
                pick = i;
            }
        }
        --bits[pick];
        --surplus;
    }
    while (surplus < 0) {
        std::size_t pick = 0;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double gain = rate(i, bits[i] + 1) - rate(i, bits[i]);
            if (gain > best_gain) {
                best_gain = gain;
                pick = i;
            }
        }
        ++bits[pick];
        ++surplus;
    }
    return bits;
}

double g_prime(double x, double beta) {
    if (x < 0.0) throw std::invalid_argument("g_prime: x must be >= 0");
    return (1.0 - beta) / ((1.0 + x) * (1.0 + beta * x) * std::numbers::ln2);
}

double g_prime_inverse(double y, double beta) {
    if (!(y > 0.0)) throw std::invalid_argument("g_prime_inverse: y must be > 0");
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("g_prime_inverse: beta outside [0, 1]");
    if (beta >= 1.0) return 0.0;
    // (1 + x)(1 + beta x) = c, solved in the cancellation-free form.
    const double excess = (1.0 - beta) / (y * std::numbers::ln2) - 1.0;
    if (!(excess > 0.0)) return 0.0;
    const double b = 1.0 + beta;
    return 2.0 * excess / (b + std::sqrt(b * b + 4.0 * beta * excess));
}

std::vector<double> quantized_water_fill(std::span<const double> singulars, double noise_var,
                                         std::span<const double> betas, double power,
                                         const SolverSettings& settings) {
    const std::size_t n = singulars.size();
    if (n == 0 || betas.size() != n) throw std::invalid_argument("quantized_water_fill: length mismatch");
    if (!(power > 0.0) || !(noise_var > 0.0))
        throw std::invalid_argument("quantized_water_fill: power and noise must be > 0");
    if (!(settings.bisection_tolerance > 0.0) || settings.max_bisection_iterations < 1 ||
        !(settings.bracket_growth_factor > 1.0))
        throw std::invalid_argument("quantized_water_fill: invalid solver settings");

    std::vector<double> gain(n);
    double nu_floor = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(betas[i] >= 0.0 && betas[i] <= 1.0))
            throw std::invalid_argument("quantized_water_fill: distortion outside [0, 1]");
        gain[i] = singulars[i] * singulars[i] / noise_var;
        if (betas[i] < 1.0 && gain[i] > 0.0)
            nu_floor = std::min(nu_floor, std::numbers::ln2 / ((1.0 - betas[i]) * gain[i]));
    }

    std::vector<double> powers(n, 0.0);
    if (std::isinf(nu_floor)) {
        powers[0] = power;
        return powers;
    }

    auto fill = [&](double nu) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            powers[i] = 0.0;
            if (betas[i] < 1.0 && gain[i] > 0.0) powers[i] = g_prime_inverse(1.0 / (nu * gain[i]), betas[i]) / gain[i];
            total += powers[i];
        }
        return total;
    };

    // Total power is zero at nu_floor and increases with nu.
    double lo = nu_floor;
    double hi = nu_floor * settings.bracket_growth_factor;
    for (int grow = 0; fill(hi) < power; ++grow) {
        if (grow > 4000) throw SolverError("quantized_water_fill: could not bracket the power budget");
        lo = hi;
        hi *= settings.bracket_growth_factor;
    }

    double total = 0.0;
    bool converged = false;
    for (int it = 0; it < settings.max_bisection_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        total = fill(mid);
        if (std::abs(total - power) <= settings.bisection_tolerance * power) {
            converged = true;
            break;
        }
        if (mid <= lo || mid >= hi) break;
        (total < power ? lo : hi) = mid;
    }
    if (!converged) {
        total = fill(hi);
        if (!(std::abs(total - power) <= 1e-8 * power))
            throw SolverError("quantized_water_fill: bisection did not converge (residual " +
                              std::to_string(std::abs(total - power) / power) + ")");
    }
    const double scale = power / total;
    for (double& p : powers) p *= scale;
    return powers;
}

std::vector<int> uniform_bits(std::size_t streams, std::span<const std::size_t> active, int bit_budget) {
    std::vector<int> bits(streams, 0);
    if (active.empty()) return bits;
    const int count = static_cast<int>(active.size());
    for (int j = 0; j < count; ++j)
        bits[active[static_cast<std::size_t>(j)]] = bit_budget / count + (j < bit_budget % count ? 1 : 0);
    return bits;
}

StreamAllocation jbp_alloc(const AllocationProblem& problem, const SolverSettings&) {
    validate(problem);
    const std::span<const double> s(problem.singulars);
    const std::size_t r = s.size();

    StreamAllocation best;
    bool have_best = false;
    SolveStats stats;
    for (std::size_t rp = 1; rp <= r; ++rp) {
        const auto head = s.first(rp);
        std::vector<double> powers = water_fill(head, problem.power, problem.noise_var);
        ++stats.power_solves;

        // Active streams form the strongest prefix.
        std::size_t active = 0;
        while (active < rp && powers[active] > 0.0) ++active;
        const auto active_powers = std::span<const double>(powers).first(active);
        const std::vector<double> real_bits = bit_waterlevel(active_powers, head, problem.bit_budget);
        ++stats.bit_solves;
        std::vector<int> bits =
            round_and_fix(real_bits, problem.bit_budget, active_powers, head, problem.noise_var, problem.model);

        auto candidate = make_allocation(padded(std::move(powers), r), padded(std::move(bits), r), s,
                                         problem.noise_var, problem.model);
        if (!have_best || candidate.sum_rate > best.sum_rate) {
            best = std::move(candidate);
            have_best = true;
        }
    }
    best.stats = stats;
    return best;
}

StreamAllocation ub_alloc(const AllocationProblem& problem, const SolverSettings& settings) {
    validate(problem);
    const std::span<const double> s(problem.singulars);
    const std::size_t r = s.size();

    StreamAllocation best;
    bool have_best = false;
    SolveStats stats;
    for (std::size_t rp = 1; rp <= r; ++rp) {
        const auto head = s.first(rp);
        std::vector<std::size_t> streams(rp);
        std::iota(streams.begin(), streams.end(), 0);
        std::vector<int> bits = uniform_bits(rp, streams, problem.bit_budget);
        std::vector<double> powers =
            quantized_water_fill(head, problem.noise_var, betas_for(bits, problem.model), problem.power, settings);
        ++stats.power_solves;

        std::vector<std::size_t> active;
        int freed = 0;
        for (std::size_t i = 0; i < rp; ++i) {
            if (powers[i] > 0.0)
                active.push_back(i);
            else
                freed += bits[i];
        }
        if (freed > 0 && !active.empty()) {
            std::vector<int> extra = uniform_bits(rp, active, freed);
            for (std::size_t i = 0; i < rp; ++i) bits[i] = powers[i] > 0.0 ? bits[i] + extra[i] : 0;
            powers = quantized_water_fill(head, problem.noise_var, betas_for(bits, problem.model), problem.power,
                                          settings);
            ++stats.power_solves;
        }

        auto candidate = make_allocation(padded(std::move(powers), r), padded(std::move(bits), r), s,
                                         problem.noise_var, problem.model);
        if (!have_best || candidate.sum_rate > best.sum_rate) {
            best = std::move(candidate);
            have_best = true;
        }
    }
    best.stats = stats;
    return best;
}

StreamAllocation greedy_alloc(const AllocationProblem& problem, const SolverSettings& settings) {
    validate(problem);
    const std::span<const double> s(problem.singulars);
    const std::size_t r = s.size();

    std::vector<int> bits(r, 0);
    std::vector<double> powers(r, 0.0);
    powers[0] = problem.power;
    SolveStats stats;
    for (int round = 0; round < problem.bit_budget; ++round) {
        std::size_t pick = 0;
        double best_rate = -1.0;
        std::vector<double> best_powers;
        for (std::size_t i = 0; i < r; ++i) {
            ++bits[i];
            const auto betas = betas_for(bits, problem.model);
            auto trial = quantized_water_fill(s, problem.noise_var, betas, problem.power, settings);
            ++stats.power_solves;
            double rate = 0.0;
            for (std::size_t j = 0; j < r; ++j) rate += stream_rate(trial[j], s[j], problem.noise_var, betas[j]);
            if (rate > best_rate) {
                best_rate = rate;
                pick = i;
                best_powers = std::move(trial);
            }
            --bits[i];
        }
        ++bits[pick];
        powers = std::move(best_powers);
    }
    auto out = make_allocation(std::move(powers), std::move(bits), s, problem.noise_var, problem.model);
    out.stats = stats;
    return out;
}

StreamAllocation unaware_wf_alloc(const AllocationProblem& problem, const SolverSettings&) {
    validate(problem);
    const std::span<const double> s(problem.singulars);
    std::vector<double> powers = water_fill(s, problem.power, problem.noise_var);
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < powers.size(); ++i)
        if (powers[i] > 0.0) active.push_back(i);
    std::vector<int> bits = uniform_bits(s.size(), active, problem.bit_budget);
    auto out = make_allocation(std::move(powers), std::move(bits), s, problem.noise_var, problem.model);
    out.stats.power_solves = 1;
    return out;
}

}  // namespace fhq
