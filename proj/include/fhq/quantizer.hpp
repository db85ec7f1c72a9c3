#ifndef FHQ_QUANTIZER_HPP
#define FHQ_QUANTIZER_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fhq {

/// Scalar quantizer for a unit-variance real Gaussian.
///
/// `levels` holds 2^bits ascending representation points and `thresholds`
/// the 2^bits - 1 decision boundaries between them. `distortion` is the
/// normalized MSE E{(Q(y) - y)^2} for y ~ N(0, 1).
struct LloydMaxCodebook {
    int bits = 0;
    std::vector<double> levels;
    std::vector<double> thresholds;
    double distortion = 1.0;
    int iterations = 0;
};

struct LloydSettings {
    double tolerance = 1e-10;
    int max_iterations = 10000;
};

/// Thrown when the Lloyd iteration exhausts its budget; carries the last iterate.
class LloydConvergenceError : public std::runtime_error {
public:
    LloydConvergenceError(const std::string& what, LloydMaxCodebook last)
        : std::runtime_error(what), last_(std::move(last)) {}
    const LloydMaxCodebook& last_iterate() const noexcept { return last_; }

private:
    LloydMaxCodebook last_;
};

inline constexpr int kMaxDesignBits = 12;

/// Lloyd-Max design for N(0, 1), started from the 2^bits quantile midpoints.
/// Each pass takes a safeguarded Newton step on the levels, then a Lloyd
/// update (midpoint thresholds, closed-form truncated-Gaussian centroids).
/// Stops once the relative change in distortion drops below
/// `settings.tolerance`; the returned levels are exact centroids of the
/// returned thresholds.
LloydMaxCodebook design_lloyd_max(int bits, const LloydSettings& settings = {});

/// Normalized MSE of an arbitrary codebook against N(0, 1), closed form.
double gaussian_mse(const std::vector<double>& levels, const std::vector<double>& thresholds);

/// Nearest-neighbour rule by thresholds; a sample sitting on a threshold
/// goes to the upper cell.
double quantize(const LloydMaxCodebook& codebook, double sample);
std::size_t cell_index(const LloydMaxCodebook& codebook, double sample);

/// Quantize a sample of standard deviation `scale`: normalize, quantize, rescale.
inline double quantize_scaled(const LloydMaxCodebook& codebook, double sample, double scale) {
    return scale * quantize(codebook, sample / scale);
}

/// Plain-text record: `bits`, `levels`, `thresholds`, `distortion` lines,
/// 12 significant digits, locale independent.
std::string format_codebook(const LloydMaxCodebook& codebook);
LloydMaxCodebook parse_codebook(std::string_view text);

/// Maps a bit count to its distortion factor beta.
///
/// beta(0) = 1, beta(1..5) from the table, and the high-rate law
/// c * 2^(-2b) with c = sqrt(3) * pi / 2 beyond the table.
struct DistortionModel {
    static constexpr int kTableBits = 5;
    std::array<double, kTableBits> table{};
    double high_rate_constant = 0.0;
    int table_bits = kTableBits;  // bits above this use the high-rate law

    double operator()(int bits) const;

    /// Table filled from converged Lloyd-Max designs (computed once, cached).
    static const DistortionModel& lloyd_max();
    /// Pure high-rate law for every b >= 1.
    static DistortionModel high_rate_only();
};

double high_rate_constant();
double distortion_factor(const DistortionModel& model, int bits);

/// Empirical Bussgang statistics of an I/Q Lloyd-Max quantizer applied to
/// y = h x + n with x ~ CN(0, P), n ~ CN(0, noise_var).
struct BussgangReport {
    std::complex<double> estimated_gain;       // E{z y*} / C_y
    std::complex<double> cross_correlation_x_eta;  // E{eta x*} / sqrt(P C_eta)
    std::complex<double> cross_correlation_y_eta;  // E{eta y*} / C_y
    double output_power_ratio = 0.0;           // C_z / ((1 - beta) C_y)
    double input_power = 0.0;                  // empirical C_y
    std::uint64_t sample_count = 0;
};

struct BussgangSetup {
    double signal_power = 1.0;
    std::complex<double> channel{1.0, 0.0};
    double noise_var = 1.0;
    std::uint64_t sample_count = 1'000'000;
    std::uint64_t seed = 0;
};

/// Samples are processed in fixed-size chunks, each with its own RNG
/// stream derived from (seed, chunk index); partial moments are reduced
/// in chunk order, so the parallel and serial variants agree bit for bit.
inline constexpr std::uint64_t kBussgangChunk = 1u << 16;

BussgangReport bussgang_check(const LloydMaxCodebook& codebook, const BussgangSetup& setup);
BussgangReport bussgang_check_serial(const LloydMaxCodebook& codebook, const BussgangSetup& setup);

}  // namespace fhq

#endif  // FHQ_QUANTIZER_HPP
