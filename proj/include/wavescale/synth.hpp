#pragma once

// Synthetic signals with known scaling: fractional Brownian motion by
// circulant embedding (Davies-Harte) and the binomial multiplicative cascade.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "wavescale/error.hpp"
#include "wavescale/multi_spectrum.hpp"
#include "wavescale/rng.hpp"
#include "wavescale/wavelet.hpp"

namespace wavescale {

struct FbmSpec {
    double hurst = 0.5;
    std::size_t n = 4096;
    std::uint64_t seed = 0;
};

struct CascadeSpec {
    double m0 = 0.6;
    int depth = 12;
    std::uint64_t seed = 0;
};

struct FbmSample {
    std::vector<double> path;
    std::string method;  // "circulant" or "cholesky"
    std::vector<std::string> warnings;
};

// fGn autocovariance at lag k for unit-variance increments.
inline double fgn_autocovariance(double hurst, double k) {
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(std::abs(k + 1.0), h2) - 2.0 * std::pow(std::abs(k), h2) +
                  std::pow(std::abs(k - 1.0), h2));
}

namespace detail {

inline void check_fbm_spec(const FbmSpec& spec) {
    if (!(spec.hurst > 0.0 && spec.hurst < 1.0)) throw Error("hurst must lie in (0, 1)");
    if (!is_power_of_two(spec.n)) throw Error("fbm length must be a power of two");
}

// Exact Gaussian fGn via the Cholesky factor of the Toeplitz covariance.
inline std::vector<double> fgn_cholesky(double hurst, std::size_t n, CounterRng& rng) {
    Eigen::MatrixXd cov(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                fgn_autocovariance(hurst, static_cast<double>(i > j ? i - j : j - i));
        }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw Error("fgn covariance is not positive definite");
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    const Eigen::VectorXd x = llt.matrixL() * z;
    return {x.data(), x.data() + x.size()};
}

}  // namespace detail

inline FbmSample gen_fbm_sample(const FbmSpec& spec) {
    detail::check_fbm_spec(spec);
    const std::size_t n = spec.n;
    const std::size_t m = 2 * n;
    CounterRng rng(spec.seed);

    // First row of the circulant: gamma(0..n), gamma(n-1..1).
    std::vector<std::complex<double>> row(m);
    for (std::size_t k = 0; k <= n; ++k) row[k] = fgn_autocovariance(spec.hurst, static_cast<double>(k));
    for (std::size_t k = n + 1; k < m; ++k) row[k] = row[m - k];
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> lambda;
    fft.fwd(lambda, row);

    FbmSample out;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    for (const auto& l : lambda) {
        lambda_max = std::max(lambda_max, l.real());
        lambda_min = std::min(lambda_min, l.real());
    }
    std::vector<double> increments;
    if (lambda_min < -1e-10 * lambda_max) {
        if (n > 4096) throw Error("circulant embedding not positive definite and n > 4096");
        out.warnings.push_back("circulant embedding has negative eigenvalue " + std::to_string(lambda_min) +
                               "; used Cholesky");
        out.method = "cholesky";
        increments = detail::fgn_cholesky(spec.hurst, n, rng);
    } else {
        out.method = "circulant";
        std::vector<std::complex<double>> z(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double scale = std::sqrt(std::max(lambda[k].real(), 0.0) / static_cast<double>(m));
            const double a = rng.normal();
            const double b = rng.normal();
            z[k] = {scale * a, scale * b};
        }
        std::vector<std::complex<double>> w;
        fft.fwd(w, z);
        increments.resize(n);
        for (std::size_t k = 0; k < n; ++k) increments[k] = w[k].real();
    }
    out.path.resize(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += increments[k];
        out.path[k] = acc;
    }
    return out;
}

inline std::vector<double> gen_fbm(const FbmSpec& spec) { return gen_fbm_sample(spec).path; }

inline std::vector<double> gen_cascade(const CascadeSpec& spec) {
    if (!(spec.m0 >= 0.5 && spec.m0 < 1.0)) throw Error("cascade m0 must lie in [0.5, 1)");
    if (spec.depth < 1 || spec.depth > 30) throw Error("cascade depth must lie in [1, 30]");
    const double m1 = 1.0 - spec.m0;
    CounterRng rng(spec.seed);
    std::vector<double> mass{1.0};
    for (int level = 0; level < spec.depth; ++level) {
        std::vector<double> next(mass.size() * 2);
        for (std::size_t k = 0; k < mass.size(); ++k) {
            const bool swap = (rng.next_u64() >> 63) != 0;
            next[2 * k] = mass[k] * (swap ? m1 : spec.m0);
            next[2 * k + 1] = mass[k] * (swap ? spec.m0 : m1);
        }
        mass.swap(next);
    }
    return mass;
}

// Closed-form tau of the binomial cascade in this library's convention.
inline double cascade_tau(double m0, double q) {
    const double m1 = 1.0 - m0;
    if (q == 0.0) return 0.0;
    return std::log2(std::pow(m0, q) + std::pow(m1, q)) - 1.0 + 0.5 * q;
}

inline MultifractalSpectrum cascade_theoretical_spectrum(double m0, const MomentGrid& grid) {
    if (!(m0 >= 0.5 && m0 < 1.0)) throw Error("cascade m0 must lie in [0.5, 1)");
    std::vector<double> tau(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) tau[i] = cascade_tau(m0, grid[i]);
    auto spec = legendre_spectrum(tau, grid);
    spec.q_range_used = QRangeUsed::Custom;
    return spec;
}

}  // namespace wavescale
