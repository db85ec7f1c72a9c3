#include "fhq/quantizer.hpp"
#include "fhq/rng.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace fhq {
namespace {

using cplx = std::complex<double>;

struct Moments {
    cplx zy{}, zx{}, yx{};
    double yy = 0.0, zz = 0.0, xx = 0.0;

    Moments& operator+=(const Moments& o) {
        zy += o.zy;
        zx += o.zx;
        yx += o.yx;
        yy += o.yy;
        zz += o.zz;
        xx += o.xx;
        return *this;
    }
};

void validate(const LloydMaxCodebook& codebook, const BussgangSetup& s) {
    if (codebook.levels.empty()) throw std::invalid_argument("bussgang_check: empty codebook");
    if (!(s.signal_power > 0.0)) throw std::invalid_argument("bussgang_check: signal power must be > 0");
    if (!(s.noise_var > 0.0)) throw std::invalid_argument("bussgang_check: noise variance must be > 0");
    if (s.sample_count == 0) throw std::invalid_argument("bussgang_check: sample count must be >= 1");
}

std::uint64_t chunk_count(const BussgangSetup& s) { return (s.sample_count + kBussgangChunk - 1) / kBussgangChunk; }

Moments chunk_moments(const LloydMaxCodebook& cb, const BussgangSetup& s, std::uint64_t chunk) {
    Engine engine(derive_seed(s.seed, chunk));
    const std::uint64_t begin = chunk * kBussgangChunk;
    const std::uint64_t end = std::min(begin + kBussgangChunk, s.sample_count);
    const double input_power = s.signal_power * std::norm(s.channel) + s.noise_var;
    const double per_dim_sd = std::sqrt(0.5 * input_power);

    Moments m;
    for (std::uint64_t i = begin; i < end; ++i) {
        const cplx x = complex_normal(engine, s.signal_power);
        const cplx n = complex_normal(engine, s.noise_var);
        const cplx y = s.channel * x + n;
        const cplx z{quantize_scaled(cb, y.real(), per_dim_sd), quantize_scaled(cb, y.imag(), per_dim_sd)};
        m.zy += z * std::conj(y);
        m.zx += z * std::conj(x);
        m.yx += y * std::conj(x);
        m.yy += std::norm(y);
        m.zz += std::norm(z);
        m.xx += std::norm(x);
    }
    return m;
}

BussgangReport finish(const LloydMaxCodebook& cb, const BussgangSetup& s, const std::vector<Moments>& parts) {
    Moments total;
    for (const auto& p : parts) total += p;

    const double count = static_cast<double>(s.sample_count);
    const cplx e_zy = total.zy / count, e_zx = total.zx / count, e_yx = total.yx / count;
    const double c_y = total.yy / count, c_z = total.zz / count, c_x = total.xx / count;

    BussgangReport r;
    r.sample_count = s.sample_count;
    r.input_power = c_y;
    r.estimated_gain = e_zy / c_y;
    const cplx gain = r.estimated_gain;
    const double c_eta = c_z - 2.0 * std::real(std::conj(gain) * e_zy) + std::norm(gain) * c_y;
    const cplx e_eta_x = e_zx - gain * e_yx;
    const cplx e_eta_y = e_zy - gain * c_y;
    r.cross_correlation_x_eta = c_eta > 0.0 ? e_eta_x / std::sqrt(c_x * c_eta) : cplx{};
    r.cross_correlation_y_eta = e_eta_y / c_y;
    r.output_power_ratio = c_z / ((1.0 - cb.distortion) * c_y);
    return r;
}

}  // namespace

BussgangReport bussgang_check(const LloydMaxCodebook& codebook, const BussgangSetup& setup) {
    validate(codebook, setup);
    const auto chunks = static_cast<std::int64_t>(chunk_count(setup));
    std::vector<Moments> parts(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c)
        parts[static_cast<std::size_t>(c)] = chunk_moments(codebook, setup, static_cast<std::uint64_t>(c));
    return finish(codebook, setup, parts);
}

BussgangReport bussgang_check_serial(const LloydMaxCodebook& codebook, const BussgangSetup& setup) {
    validate(codebook, setup);
    const auto chunks = chunk_count(setup);
    std::vector<Moments> parts;
    parts.reserve(chunks);
    for (std::uint64_t c = 0; c < chunks; ++c) parts.push_back(chunk_moments(codebook, setup, c));
    return finish(codebook, setup, parts);
}

}  // namespace fhq
