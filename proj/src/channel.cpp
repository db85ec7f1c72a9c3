#include "fhq/channel.hpp"

#include "fhq/format.hpp"
#include "fhq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fhq {
namespace {

std::vector<double> truncate_rank(std::vector<double> s) {
    std::sort(s.begin(), s.end(), std::greater<>());
    if (s.empty() || !(s.front() > 0.0)) throw std::invalid_argument("svd_streams: matrix is all zero");
    const double floor = kRankTolerance * s.front();
    s.erase(std::find_if(s.begin(), s.end(), [floor](double v) { return !(v > floor); }), s.end());
    return s;
}

std::vector<double> dense_singulars(const Eigen::MatrixXcd& h) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(h);
    const auto& sv = svd.singularValues();
    return truncate_rank(std::vector<double>(sv.data(), sv.data() + sv.size()));
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

Eigen::VectorXcd ula_steering(int n_antennas, double angle, double spacing) {
    if (n_antennas < 1) throw std::invalid_argument("ula_steering: need at least one antenna");
    Eigen::VectorXcd a(n_antennas);
    const double phase = 2.0 * std::numbers::pi * spacing * std::sin(angle);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_antennas));
    for (int n = 0; n < n_antennas; ++n) a(n) = std::polar(norm, phase * n);
    return a;
}

ChannelRealization generate_rician(const RicianConfig& cfg, std::uint64_t seed, bool keep_factors) {
    if (cfg.m < 1 || cfg.k < 1) throw std::invalid_argument("generate_rician: antenna counts must be >= 1");
    if (!(cfg.kappa >= 0.0) || !std::isfinite(cfg.kappa))
        throw std::invalid_argument("generate_rician: kappa must be finite and >= 0");
    if (cfg.nlos_paths < 1) throw std::invalid_argument("generate_rician: need at least one NLOS path");

    Engine engine(seed);
    std::uniform_real_distribution<double> azimuth(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
    const double mk = static_cast<double>(cfg.m) * cfg.k;
    const double los_amp = std::sqrt(cfg.kappa / (cfg.kappa + 1.0) * mk);
    const double nlos_amp = std::sqrt(1.0 / (cfg.kappa + 1.0) * mk / cfg.nlos_paths);

    ChannelRealization out;
    const double los_rx = azimuth(engine);
    const double los_tx = azimuth(engine);
    out.matrix = los_amp * ula_steering(cfg.m, los_rx, cfg.antenna_spacing) *
                 ula_steering(cfg.k, los_tx, cfg.antenna_spacing).adjoint();
    for (int l = 0; l < cfg.nlos_paths; ++l) {
        const double rx = azimuth(engine);
        const double tx = azimuth(engine);
        const std::complex<double> gain = nlos_amp * complex_normal(engine, 1.0);
        out.matrix.noalias() += gain * ula_steering(cfg.m, rx, cfg.antenna_spacing) *
                                ula_steering(cfg.k, tx, cfg.antenna_spacing).adjoint();
    }

    if (keep_factors) {
        out.factors = compact_svd(out.matrix);
        out.singulars = out.factors->singulars;
    } else {
        out.singulars = svd_streams(out.matrix);
    }
    return out;
}

std::vector<double> svd_streams(const Eigen::MatrixXcd& h) {
    if (h.size() == 0) throw std::invalid_argument("svd_streams: empty matrix");
    const auto rows = h.rows(), cols = h.cols();
    if (rows < 4 * cols && cols < 4 * rows) return dense_singulars(h);

    const Eigen::MatrixXcd gram = rows >= cols ? Eigen::MatrixXcd(h.adjoint() * h) : Eigen::MatrixXcd(h * h.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    std::vector<double> s(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index i = 0; i < ev.size(); ++i) s[static_cast<std::size_t>(i)] = std::sqrt(std::max(ev(i), 0.0));
    if (!(*std::max_element(s.begin(), s.end()) > 0.0)) throw std::invalid_argument("svd_streams: matrix is all zero");

    // Gram eigenvalues carry absolute error ~eps * s_1^2, so a tail below
    // ~1e-6 s_1 cannot be told apart from rank deficiency.
    const double s1 = *std::max_element(s.begin(), s.end());
    const double smin = *std::min_element(s.begin(), s.end());
    if (smin < 1e-6 * s1) return dense_singulars(h);
    return truncate_rank(std::move(s));
}

CompactSvd compact_svd(const Eigen::MatrixXcd& h) {
    if (h.size() == 0) throw std::invalid_argument("compact_svd: empty matrix");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv(0) > 0.0)) throw std::invalid_argument("compact_svd: matrix is all zero");
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > kRankTolerance * sv(0)) ++rank;
    CompactSvd out;
    out.left = svd.matrixU().leftCols(rank);
    out.right = svd.matrixV().leftCols(rank);
    out.singulars.assign(sv.data(), sv.data() + rank);
    return out;
}

double snr_per_antenna(std::span<const double> singulars, double power, double noise_var, int m, int k) {
    double energy = 0.0;
    for (double s : singulars) energy += s * s;
    return power * energy / (static_cast<double>(m) * k * noise_var);
}

std::vector<double> scale_to_snr(std::span<const double> singulars, double power, double noise_var,
                                 double target_snr, int m, int k) {
    if (singulars.empty()) throw std::invalid_argument("scale_to_snr: no singular values");
    if (!(target_snr > 0.0)) throw std::invalid_argument("scale_to_snr: target SNR must be > 0");
    if (!(power > 0.0) || !(noise_var > 0.0) || m < 1 || k < 1)
        throw std::invalid_argument("scale_to_snr: power, noise variance and antenna counts must be positive");
    const double current = snr_per_antenna(singulars, power, noise_var, m, k);
    if (!(current > 0.0)) throw std::invalid_argument("scale_to_snr: all singular values are zero");
    const double c = std::sqrt(target_snr / current);
    std::vector<double> out(singulars.begin(), singulars.end());
    if (c != 1.0)
        for (double& s : out) s *= c;
    return out;
}

std::string format_singulars(std::span<const double> singulars) {
    std::string out;
    for (std::size_t i = 0; i < singulars.size(); ++i) {
        if (i) out += ',';
        out += format_number(singulars[i]);
    }
    return out;
}

}  // namespace fhq
