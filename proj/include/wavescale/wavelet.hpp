#pragma once

// Orthogonal periodic discrete wavelet transform (Mallat pyramid) and a
// dense-matrix reference implementation used as a test oracle.
//
// Coefficient layout follows the hierarchical ordering
//   (c_{j0}, d_{j0}, d_{j0+1}, ..., d_{J-1}),   N = 2^J,
// where detail level j holds 2^j coefficients and j = J-1 is the finest.

#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wavescale/detail/filter_tables.hpp"
#include "wavescale/error.hpp"

namespace wavescale {

enum class WaveletFamily { Haar, Daubechies, Symmlet };

class WaveletFilter {
 public:
    WaveletFilter(WaveletFamily family, int order, std::vector<double> low_pass)
        : family_(family), order_(order), low_pass_(std::move(low_pass)) {
        const std::size_t len = low_pass_.size();
        high_pass_.resize(len);
        // Quadrature mirror: g[k] = (-1)^k h[L-1-k].
        for (std::size_t k = 0; k < len; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            high_pass_[k] = sign * low_pass_[len - 1 - k];
        }
    }

    WaveletFamily family() const noexcept { return family_; }
    int order() const noexcept { return order_; }
    std::size_t length() const noexcept { return low_pass_.size(); }
    std::span<const double> low_pass() const noexcept { return low_pass_; }
    std::span<const double> high_pass() const noexcept { return high_pass_; }

    std::string id() const {
        switch (family_) {
            case WaveletFamily::Haar: return "haar";
            case WaveletFamily::Daubechies: return "db" + std::to_string(order_);
            case WaveletFamily::Symmlet: return "sym" + std::to_string(order_);
        }
        return "unknown";
    }

 private:
    WaveletFamily family_;
    int order_;
    std::vector<double> low_pass_;
    std::vector<double> high_pass_;
};

inline WaveletFilter build_filter(WaveletFamily family, int order) {
    switch (family) {
        case WaveletFamily::Haar:
            if (order != 1) {
                throw Error("unsupported order " + std::to_string(order) + " for Haar (only 1)");
            }
            return WaveletFilter(family, 1, {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0});
        case WaveletFamily::Daubechies: {
            if (order == 1) return WaveletFilter(family, 1, {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0});
            const auto table = detail::daubechies_table(order);
            if (table.empty()) {
                throw Error("unsupported order " + std::to_string(order) + " for Daubechies (1-10)");
            }
            return WaveletFilter(family, order, {table.begin(), table.end()});
        }
        case WaveletFamily::Symmlet: {
            const auto table = detail::symmlet_table(order);
            if (table.empty()) {
                throw Error("unsupported order " + std::to_string(order) + " for Symmlet (2-10)");
            }
            return WaveletFilter(family, order, {table.begin(), table.end()});
        }
    }
    throw Error("unknown wavelet family");
}

// Parses "haar", "dbN" or "symN".
inline WaveletFilter filter_from_id(std::string_view id) {
    auto parse_order = [&](std::string_view digits) {
        if (digits.empty()) throw Error("unsupported wavelet id '" + std::string(id) + "'");
        int order = 0;
        for (char c : digits) {
            if (c < '0' || c > '9') throw Error("unsupported wavelet id '" + std::string(id) + "'");
            order = order * 10 + (c - '0');
        }
        return order;
    };
    if (id == "haar") return build_filter(WaveletFamily::Haar, 1);
    if (id.starts_with("sym")) return build_filter(WaveletFamily::Symmlet, parse_order(id.substr(3)));
    if (id.starts_with("db")) return build_filter(WaveletFamily::Daubechies, parse_order(id.substr(2)));
    throw Error("unsupported wavelet id '" + std::string(id) + "'");
}

inline bool is_power_of_two(std::size_t n) noexcept { return n != 0 && std::has_single_bit(n); }

inline int log2_exact(std::size_t n) { return static_cast<int>(std::bit_width(n)) - 1; }

class WaveletDecomposition {
 public:
    WaveletDecomposition() = default;

    // details[i] holds level j0 + i. Throws if the level lengths disagree.
    WaveletDecomposition(std::vector<double> coarse, std::vector<std::vector<double>> details, int j0)
        : coarse_(std::move(coarse)), details_(std::move(details)), j0_(j0) {
        if (j0_ < 0 || coarse_.size() != (std::size_t{1} << j0_)) {
            throw Error("inconsistent decomposition: coarse length " + std::to_string(coarse_.size()) +
                        " does not match j0 = " + std::to_string(j0_));
        }
        n_ = coarse_.size();
        for (std::size_t i = 0; i < details_.size(); ++i) {
            const std::size_t expect = std::size_t{1} << (j0_ + static_cast<int>(i));
            if (details_[i].size() != expect) {
                throw Error("inconsistent decomposition: level " + std::to_string(j0_ + static_cast<int>(i)) +
                            " has " + std::to_string(details_[i].size()) + " coefficients, expected " +
                            std::to_string(expect));
            }
            n_ += expect;
        }
    }

    std::size_t size() const noexcept { return n_; }
    int j0() const noexcept { return j0_; }
    // J with N = 2^J.
    int depth() const noexcept { return j0_ + static_cast<int>(details_.size()); }
    int finest_level() const noexcept { return depth() - 1; }
    std::size_t level_count() const noexcept { return details_.size(); }

    std::span<const double> coarse() const noexcept { return coarse_; }

    bool has_level(int j) const noexcept { return j >= j0_ && j < depth(); }

    std::span<const double> detail(int j) const {
        if (!has_level(j)) throw Error("detail level " + std::to_string(j) + " not present");
        return details_[static_cast<std::size_t>(j - j0_)];
    }

    std::vector<double> flatten() const {
        std::vector<double> out(coarse_.begin(), coarse_.end());
        out.reserve(n_);
        for (const auto& d : details_) out.insert(out.end(), d.begin(), d.end());
        return out;
    }

 private:
    std::vector<double> coarse_;
    std::vector<std::vector<double>> details_;
    int j0_ = 0;
    std::size_t n_ = 0;
};

namespace detail {

inline void check_signal(std::size_t n, int j0) {
    if (!is_power_of_two(n) || n < 2) {
        throw Error("signal length " + std::to_string(n) + " is not a power of two");
    }
    const int depth = log2_exact(n);
    if (j0 < 1 || j0 > depth - 1) {
        throw Error("coarsest level j0 = " + std::to_string(j0) + " outside [1, " + std::to_string(depth - 1) + "]");
    }
}

// One analysis step with periodic extension: out[k] = sum_m f[m] x[(2k+m) mod n].
inline void analysis_step(std::span<const double> x, std::span<const double> h, std::span<const double> g,
                          std::vector<double>& approx, std::vector<double>& detail) {
    const std::size_t n = x.size();
    const std::size_t half = n / 2;
    approx.assign(half, 0.0);
    detail.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t m = 0; m < h.size(); ++m) {
            const double v = x[(2 * k + m) % n];
            a += h[m] * v;
            d += g[m] * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

inline void synthesis_step(std::span<const double> approx, std::span<const double> detail,
                           std::span<const double> h, std::span<const double> g, std::vector<double>& out) {
    const std::size_t n = approx.size() * 2;
    out.assign(n, 0.0);
    for (std::size_t k = 0; k < approx.size(); ++k) {
        for (std::size_t m = 0; m < h.size(); ++m) {
            out[(2 * k + m) % n] += h[m] * approx[k] + g[m] * detail[k];
        }
    }
}

}  // namespace detail

inline WaveletDecomposition dwt(std::span<const double> signal, const WaveletFilter& filter, int j0) {
    detail::check_signal(signal.size(), j0);
    const int depth = log2_exact(signal.size());
    std::vector<std::vector<double>> details(static_cast<std::size_t>(depth - j0));
    std::vector<double> current(signal.begin(), signal.end());
    std::vector<double> approx;
    for (int j = depth - 1; j >= j0; --j) {
        auto& d = details[static_cast<std::size_t>(j - j0)];
        detail::analysis_step(current, filter.low_pass(), filter.high_pass(), approx, d);
        current.swap(approx);
    }
    return WaveletDecomposition(std::move(current), std::move(details), j0);
}

inline std::vector<double> idwt(const WaveletDecomposition& decomp, const WaveletFilter& filter) {
    std::vector<double> current(decomp.coarse().begin(), decomp.coarse().end());
    std::vector<double> next;
    for (int j = decomp.j0(); j < decomp.depth(); ++j) {
        detail::synthesis_step(current, decomp.detail(j), filter.low_pass(), filter.high_pass(), next);
        current.swap(next);
    }
    return current;
}

// Explicit orthogonal matrix W with rows ordered as the flattened layout.
// O(N^2) memory; intended for N <= 256.
inline Eigen::MatrixXd dwt_matrix(std::size_t n, const WaveletFilter& filter, int j0) {
    detail::check_signal(n, j0);
    const int depth = log2_exact(n);
    const auto h = filter.low_pass();
    const auto g = filter.high_pass();
    auto step = [&](std::size_t m, std::span<const double> f) {
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m / 2), static_cast<Eigen::Index>(m));
        for (std::size_t k = 0; k < m / 2; ++k) {
            for (std::size_t t = 0; t < f.size(); ++t) {
                block(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>((2 * k + t) % m)) += f[t];
            }
        }
        return block;
    };
    // approx_op maps the signal to the approximation at the current level.
    Eigen::MatrixXd approx_op = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<Eigen::MatrixXd> detail_rows(static_cast<std::size_t>(depth - j0));
    std::size_t m = n;
    for (int j = depth - 1; j >= j0; --j) {
        detail_rows[static_cast<std::size_t>(j - j0)] = step(m, g) * approx_op;
        approx_op = step(m, h) * approx_op;
        m /= 2;
    }
    Eigen::MatrixXd w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::Index row = 0;
    w.middleRows(row, approx_op.rows()) = approx_op;
    row += approx_op.rows();
    for (const auto& block : detail_rows) {
        w.middleRows(row, block.rows()) = block;
        row += block.rows();
    }
    return w;
}

inline std::vector<double> dwt_matrix_oracle(std::span<const double> signal, const WaveletFilter& filter, int j0) {
    detail::check_signal(signal.size(), j0);
    if (signal.size() > 256) throw Error("matrix oracle limited to N <= 256");
    const Eigen::MatrixXd w = dwt_matrix(signal.size(), filter, j0);
    const Eigen::Map<const Eigen::VectorXd> y(signal.data(), static_cast<Eigen::Index>(signal.size()));
    const Eigen::VectorXd d = w * y;
    return {d.data(), d.data() + d.size()};
}

}  // namespace wavescale
