#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "wavescale/classify/models.hpp"
#include "wavescale/error.hpp"

namespace wavescale::classify {

struct PcaProjection {
    Vector mean;
    Matrix components;  // features x n_components, unit columns
    Vector eigenvalues;
    Vector explained_ratio;
};

// Covariance eigendecomposition, or the n x n Gram matrix when features
// outnumber samples. Each component's largest-magnitude loading is positive.
inline PcaProjection pca_fit(const Matrix& x, int n_components) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n < 2) throw Error("pca needs at least 2 samples");
    if (n_components < 1 || n_components > std::min(n - 1, p)) {
        throw Error("pca n_components " + std::to_string(n_components) + " exceeds min(n-1, features) = " +
                    std::to_string(std::min(n - 1, p)));
    }
    PcaProjection proj;
    proj.mean = x.colwise().mean();
    const Matrix c = x.rowwise() - proj.mean.transpose();
    const double denom = static_cast<double>(n - 1);
    Vector evals;
    Matrix evecs;
    if (p <= n) {
        const Eigen::SelfAdjointEigenSolver<Matrix> es(c.transpose() * c / denom);
        evals = es.eigenvalues();
        evecs = es.eigenvectors();
    } else {
        const Eigen::SelfAdjointEigenSolver<Matrix> es(c * c.transpose() / denom);
        evals = es.eigenvalues();
        evecs = c.transpose() * es.eigenvectors();
        for (Eigen::Index k = 0; k < evecs.cols(); ++k) {
            const double norm = evecs.col(k).norm();
            if (norm > 0.0) evecs.col(k) /= norm;
        }
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(evals.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return evals(a) > evals(b); });
    const double total = std::max(evals.cwiseMax(0.0).sum(), 1e-300);
    proj.components.resize(p, n_components);
    proj.eigenvalues.resize(n_components);
    proj.explained_ratio.resize(n_components);
    for (int k = 0; k < n_components; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        Vector v = evecs.col(src);
        Eigen::Index big = 0;
        v.cwiseAbs().maxCoeff(&big);
        if (v(big) < 0.0) v = -v;
        proj.components.col(k) = v;
        proj.eigenvalues(k) = std::max(evals(src), 0.0);
        proj.explained_ratio(k) = proj.eigenvalues(k) / total;
    }
    return proj;
}

inline Matrix pca_transform(const PcaProjection& proj, const Matrix& x) {
    if (x.cols() != proj.mean.size()) throw Error("pca_transform: feature count mismatch");
    return (x.rowwise() - proj.mean.transpose()) * proj.components;
}

inline Matrix pca_inverse(const PcaProjection& proj, const Matrix& scores) {
    return (scores * proj.components.transpose()).rowwise() + proj.mean.transpose();
}

}  // namespace wavescale::classify
