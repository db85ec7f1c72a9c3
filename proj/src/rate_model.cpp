#include "fhq/rate_model.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace fhq {

int StreamAllocation::total_bits() const { return std::accumulate(bits.begin(), bits.end(), 0); }

double StreamAllocation::total_power() const { return std::accumulate(powers.begin(), powers.end(), 0.0); }

double stream_rate(double power, double singular, double noise_var, double beta) {
    if (!(noise_var > 0.0)) throw std::invalid_argument("stream_rate: noise variance must be > 0");
    if (power < 0.0 || singular < 0.0) throw std::invalid_argument("stream_rate: negative power or gain");
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("stream_rate: distortion outside [0, 1]");
    if (beta == 1.0 || power == 0.0 || singular == 0.0) return 0.0;

    const double snr = power * singular * singular / noise_var;
    // The SINR saturates at (1 - beta) / beta; log1p keeps precision at low SINR.
    const double sinr = (1.0 - beta) * snr / (beta * snr + 1.0);
    return std::log1p(sinr) / std::numbers::ln2;
}

double sum_rate(const StreamAllocation& alloc, std::span<const double> singulars, double noise_var) {
    if (alloc.distortions.size() != alloc.powers.size())
        throw std::invalid_argument("sum_rate: allocation sequences differ in length");
    if (alloc.powers.size() > singulars.size())
        throw std::invalid_argument("sum_rate: more streams than singular values");
    double total = 0.0;
    for (std::size_t i = 0; i < alloc.powers.size(); ++i)
        total += stream_rate(alloc.powers[i], singulars[i], noise_var, alloc.distortions[i]);
    return total;
}

double ideal_rate(std::span<const double> powers, std::span<const double> singulars, double noise_var) {
    if (powers.size() > singulars.size())
        throw std::invalid_argument("ideal_rate: more powers than singular values");
    double total = 0.0;
    for (std::size_t i = 0; i < powers.size(); ++i) total += stream_rate(powers[i], singulars[i], noise_var, 0.0);
    return total;
}

StreamAllocation make_allocation(std::vector<double> powers, std::vector<int> bits,
                                 std::span<const double> singulars, double noise_var,
                                 const DistortionModel& model) {
    if (powers.size() != bits.size()) throw std::invalid_argument("make_allocation: powers/bits length mismatch");
    if (powers.size() > singulars.size())
        throw std::invalid_argument("make_allocation: more streams than singular values");
    StreamAllocation a;
    a.powers = std::move(powers);
    a.bits = std::move(bits);
    const std::size_t n = a.powers.size();
    a.distortions.resize(n);
    a.stream_rates.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        a.distortions[i] = model(a.bits[i]);
        a.stream_rates[i] = stream_rate(a.powers[i], singulars[i], noise_var, a.distortions[i]);
        a.sum_rate += a.stream_rates[i];
        if (a.powers[i] > 0.0 && a.bits[i] > 0) ++a.active_count;
    }
    return a;
}

}  // namespace fhq
