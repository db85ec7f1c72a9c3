#ifndef FHQ_CHANNEL_HPP
#define FHQ_CHANNEL_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fhq {

/// Rician MIMO channel between K-antenna and M-antenna uniform linear arrays.
struct RicianConfig {
    int m = 128;  // receive antennas
    int k = 16;   // transmit antennas
    double kappa = 1.0;  // linear LOS-to-scattered power ratio
    int nlos_paths = 200;
    double antenna_spacing = 0.5;  // in wavelengths
};

struct CompactSvd {
    Eigen::MatrixXcd left;   // M x r
    std::vector<double> singulars;
    Eigen::MatrixXcd right;  // K x r
};

struct ChannelRealization {
    Eigen::MatrixXcd matrix;
    std::vector<double> singulars;  // descending, rank-truncated
    std::optional<CompactSvd> factors;
};

inline constexpr double kRankTolerance = 1e-12;

double db_to_linear(double db);

/// Unit-norm ULA response, entries exp(j 2 pi d n sin(angle)) / sqrt(n_antennas).
Eigen::VectorXcd ula_steering(int n_antennas, double angle, double spacing);

/// One LOS path plus `nlos_paths` CN(0, 1) scattered paths, all azimuths
/// uniform on [-pi/2, pi/2]; normalized so E{||H||_F^2} = M K.
ChannelRealization generate_rician(const RicianConfig& config, std::uint64_t seed, bool keep_factors = false);

/// Descending nonzero singular values. Tall or wide matrices go through the
/// smaller Gram matrix unless that would lose the weak tail.
std::vector<double> svd_streams(const Eigen::MatrixXcd& h);

/// Dense thin SVD truncated at kRankTolerance * s_1.
CompactSvd compact_svd(const Eigen::MatrixXcd& h);

double snr_per_antenna(std::span<const double> singulars, double power, double noise_var, int m, int k);

/// Scales singulars by one common factor so that
/// P * sum(s_i^2) / (M K noise_var) == target_snr.
std::vector<double> scale_to_snr(std::span<const double> singulars, double power, double noise_var,
                                 double target_snr, int m, int k);

/// One-line comma-separated record, 12 significant digits.
std::string format_singulars(std::span<const double> singulars);

}  // namespace fhq

#endif  // FHQ_CHANNEL_HPP
