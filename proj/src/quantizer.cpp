#include "fhq/quantizer.hpp"

#include "fhq/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

namespace fhq {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_pdf(double x) {
    if (std::isinf(x)) return 0.0;
    return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

double x_pdf(double x) { return std::isinf(x) ? 0.0 : x * normal_pdf(x); }

// Upper tail 1 - Phi(x), accurate far into either tail.
double upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Phi(b) - Phi(a) without cancellation in the tails.
double cell_probability(double a, double b) {
    if (a >= 0.0) return upper_tail(a) - upper_tail(b);
    if (b <= 0.0) return upper_tail(-b) - upper_tail(-a);
    return 1.0 - upper_tail(b) - upper_tail(-a);
}

double normal_quantile(double p) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p); }

struct CellMoments {
    double prob;
    double first;   // integral of y phi(y)
    double spread;  // integral of (y - centroid)^2 phi(y)
};

CellMoments cell_moments(double a, double b) {
    const double prob = cell_probability(a, b);
    const double first = normal_pdf(a) - normal_pdf(b);
    // p * Var = p + a phi(a) - b phi(b) - m1^2 / p
    double spread = prob + x_pdf(a) - x_pdf(b) - first * first / prob;
    spread = std::max(spread, 0.0);
    return {prob, first, spread};
}

void symmetrize(std::vector<double>& levels) {
    const std::size_t n = levels.size();
    for (std::size_t j = 0; j < n / 2; ++j) {
        const double v = 0.5 * (levels[n - 1 - j] - levels[j]);
        levels[j] = -v;
        levels[n - 1 - j] = v;
    }
}

std::vector<double> midpoints(const std::vector<double>& levels) {
    std::vector<double> t(levels.size() - 1);
    for (std::size_t j = 0; j + 1 < levels.size(); ++j) t[j] = 0.5 * (levels[j] + levels[j + 1]);
    return t;
}

std::vector<double> centroids(const std::vector<double>& thresholds) {
    const std::size_t n = thresholds.size() + 1;
    std::vector<double> c(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double a = j == 0 ? -kInf : thresholds[j - 1];
        const double b = j + 1 == n ? kInf : thresholds[j];
        const auto m = cell_moments(a, b);
        c[j] = m.first / m.prob;
    }
    return c;
}

bool strictly_ascending(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

// Newton step on the levels for the MSE with midpoint thresholds. The
// Hessian is tridiagonal; the step is halved until the MSE drops and the
// levels stay ordered. Returns false when no improving step was found.
bool newton_refine(std::vector<double>& levels) {
    const std::size_t n = levels.size();
    if (n < 2) return false;
    const auto t = midpoints(levels);

    std::vector<double> grad(n), diag(n), off(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        const double a = j == 0 ? -kInf : t[j - 1];
        const double b = j + 1 == n ? kInf : t[j];
        const double prob = cell_probability(a, b);
        grad[j] = 2.0 * (levels[j] * prob - (normal_pdf(a) - normal_pdf(b)));
        diag[j] = 2.0 * prob;
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double coupling = 0.5 * (levels[j + 1] - levels[j]) * normal_pdf(t[j]);
        off[j] = -coupling;
        diag[j] -= coupling;
        diag[j + 1] -= coupling;
    }

    // Thomas algorithm for H step = -grad.
    std::vector<double> c(n - 1), d(n);
    double pivot = diag[0];
    if (!(pivot > 0.0)) return false;
    c[0] = off[0] / pivot;
    d[0] = -grad[0] / pivot;
    for (std::size_t j = 1; j < n; ++j) {
        pivot = diag[j] - off[j - 1] * c[j - 1];
        if (!(pivot > 0.0)) return false;
        if (j + 1 < n) c[j] = off[j] / pivot;
        d[j] = (-grad[j] - off[j - 1] * d[j - 1]) / pivot;
    }
    for (std::size_t j = n - 1; j-- > 0;) d[j] -= c[j] * d[j + 1];

    const double current = gaussian_mse(levels, t);
    std::vector<double> trial(n);
    for (double step = 1.0; step > 1e-6; step *= 0.5) {
        for (std::size_t j = 0; j < n; ++j) trial[j] = levels[j] + step * d[j];
        symmetrize(trial);
        if (strictly_ascending(trial) && gaussian_mse(trial, midpoints(trial)) < current) {
            levels.swap(trial);
            return true;
        }
    }
    return false;
}

}  // namespace

double gaussian_mse(const std::vector<double>& levels, const std::vector<double>& thresholds) {
    if (levels.empty() || thresholds.size() + 1 != levels.size())
        throw std::invalid_argument("gaussian_mse: need one more level than thresholds");
    double mse = 0.0;
    const std::size_t n = levels.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double a = j == 0 ? -kInf : thresholds[j - 1];
        const double b = j + 1 == n ? kInf : thresholds[j];
        const auto m = cell_moments(a, b);
        const double offset = m.first / m.prob - levels[j];
        mse += m.spread + m.prob * offset * offset;
    }
    return mse;
}

LloydMaxCodebook design_lloyd_max(int bits, const LloydSettings& settings) {
    if (bits < 1 || bits > kMaxDesignBits)
        throw std::invalid_argument("design_lloyd_max: bits must lie in [1, " +
                                    std::to_string(kMaxDesignBits) + "], got " + std::to_string(bits));
    if (!(settings.tolerance > 0.0) || settings.max_iterations < 1)
        throw std::invalid_argument("design_lloyd_max: tolerance and max_iterations must be positive");

    const std::size_t n = std::size_t{1} << bits;
    LloydMaxCodebook cb;
    cb.bits = bits;
    cb.levels.resize(n);
    for (std::size_t j = 0; j < n; ++j) cb.levels[j] = normal_quantile((static_cast<double>(j) + 0.5) / n);
    symmetrize(cb.levels);

    double previous = kInf;
    for (int it = 1; it <= settings.max_iterations; ++it) {
        if (it > 1) newton_refine(cb.levels);
        cb.thresholds = midpoints(cb.levels);
        cb.levels = centroids(cb.thresholds);
        symmetrize(cb.levels);
        cb.distortion = gaussian_mse(cb.levels, cb.thresholds);
        cb.iterations = it;
        if (std::abs(previous - cb.distortion) < settings.tolerance * cb.distortion) return cb;
        previous = cb.distortion;
    }
    throw LloydConvergenceError("design_lloyd_max: no convergence for bits=" + std::to_string(bits) +
                                    " after " + std::to_string(settings.max_iterations) + " iterations",
                                std::move(cb));
}

std::size_t cell_index(const LloydMaxCodebook& codebook, double sample) {
    const auto it = std::upper_bound(codebook.thresholds.begin(), codebook.thresholds.end(), sample);
    return static_cast<std::size_t>(it - codebook.thresholds.begin());
}

double quantize(const LloydMaxCodebook& codebook, double sample) {
    return codebook.levels[cell_index(codebook, sample)];
}

std::string format_codebook(const LloydMaxCodebook& codebook) {
    std::string out = "bits " + std::to_string(codebook.bits) + "\nlevels";
    for (double v : codebook.levels) out += ' ' + format_number(v);
    out += "\nthresholds";
    for (double v : codebook.thresholds) out += ' ' + format_number(v);
    out += "\ndistortion " + format_number(codebook.distortion) + '\n';
    return out;
}

LloydMaxCodebook parse_codebook(std::string_view text) {
    LloydMaxCodebook cb;
    bool seen_bits = false, seen_distortion = false;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string key;
        if (!(fields >> key)) continue;
        std::vector<double> values;
        std::string token;
        while (fields >> token) {
            auto v = parse_number(token);
            if (!v) throw std::invalid_argument("parse_codebook: bad number '" + token + "' in " + key);
            values.push_back(*v);
        }
        if (key == "bits" && values.size() == 1) {
            cb.bits = static_cast<int>(values[0]);
            seen_bits = true;
        } else if (key == "levels") {
            cb.levels = std::move(values);
        } else if (key == "thresholds") {
            cb.thresholds = std::move(values);
        } else if (key == "distortion" && values.size() == 1) {
            cb.distortion = values[0];
            seen_distortion = true;
        } else {
            throw std::invalid_argument("parse_codebook: unexpected record '" + key + "'");
        }
    }
    const std::size_t n = std::size_t{1} << std::clamp(cb.bits, 0, 30);
    if (!seen_bits || !seen_distortion || cb.levels.size() != n || cb.thresholds.size() + 1 != n)
        throw std::invalid_argument("parse_codebook: incomplete or inconsistent record");
    return cb;
}

double high_rate_constant() { return std::numbers::sqrt3 * std::numbers::pi / 2.0; }

double DistortionModel::operator()(int bits) const {
    if (bits < 0) throw std::invalid_argument("distortion model: negative bit count");
    if (bits == 0) return 1.0;
    if (bits <= table_bits) return table[static_cast<std::size_t>(bits - 1)];
    return high_rate_constant * std::exp2(-2.0 * bits);
}

const DistortionModel& DistortionModel::lloyd_max() {
    static const DistortionModel model = [] {
        DistortionModel m;
        m.high_rate_constant = fhq::high_rate_constant();
        for (int b = 1; b <= kTableBits; ++b)
            m.table[static_cast<std::size_t>(b - 1)] = design_lloyd_max(b).distortion;
        return m;
    }();
    return model;
}

DistortionModel DistortionModel::high_rate_only() {
    DistortionModel m;
    m.high_rate_constant = fhq::high_rate_constant();
    m.table_bits = 0;
    return m;
}

double distortion_factor(const DistortionModel& model, int bits) { return model(bits); }

}  // namespace fhq
