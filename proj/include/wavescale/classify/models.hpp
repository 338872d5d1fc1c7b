#pragma once

// Classifier families used by the evaluation protocol. Inputs are dense
// samples x features matrices; labels are class indices 0..C-1. Features are
// expected to be standardized by the caller.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "wavescale/error.hpp"

namespace wavescale::classify {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

enum class ModelFamily { KNN, GNB, LDA, QDA, Logit, LinearSVM, PLSDA };

inline constexpr std::array<ModelFamily, 7> kAllFamilies = {ModelFamily::KNN,   ModelFamily::GNB,
                                                            ModelFamily::LDA,   ModelFamily::QDA,
                                                            ModelFamily::Logit, ModelFamily::LinearSVM,
                                                            ModelFamily::PLSDA};

inline std::string_view to_string(ModelFamily f) noexcept {
    switch (f) {
        case ModelFamily::KNN: return "KNN";
        case ModelFamily::GNB: return "GNB";
        case ModelFamily::LDA: return "LDA";
        case ModelFamily::QDA: return "QDA";
        case ModelFamily::Logit: return "Logit";
        case ModelFamily::LinearSVM: return "LinearSVM";
        case ModelFamily::PLSDA: return "PLSDA";
    }
    return "unknown";
}

inline ModelFamily family_from_string(std::string_view s) {
    for (auto f : kAllFamilies) {
        if (to_string(f) == s) return f;
    }
    throw Error("unknown model family '" + std::string(s) + "'");
}

struct ModelSpec {
    ModelFamily family = ModelFamily::KNN;
    int n_neighbors = 5;     // KNN
    int p = 2;               // KNN distance exponent, 1 or 2
    double shrinkage = 0.0;  // LDA
    double l1_ratio = 0.0;   // Logit
    double C = 1.0;          // Logit, LinearSVM
    int n_components = 2;    // PLSDA

    void validate() const {
        switch (family) {
            case ModelFamily::KNN:
                if (n_neighbors < 1) throw Error("KNN n_neighbors must be >= 1");
                if (p != 1 && p != 2) throw Error("KNN p must be 1 or 2");
                break;
            case ModelFamily::LDA:
                if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) throw Error("LDA shrinkage must lie in [0, 1]");
                break;
            case ModelFamily::Logit:
                if (!(l1_ratio >= 0.0 && l1_ratio <= 1.0)) throw Error("Logit l1_ratio must lie in [0, 1]");
                if (!(C > 0.0)) throw Error("Logit C must be positive");
                break;
            case ModelFamily::LinearSVM:
                if (!(C > 0.0)) throw Error("LinearSVM C must be positive");
                break;
            case ModelFamily::PLSDA:
                if (n_components < 1) throw Error("PLSDA n_components must be >= 1");
                break;
            case ModelFamily::GNB:
            case ModelFamily::QDA: break;
        }
    }

    std::string describe() const {
        switch (family) {
            case ModelFamily::KNN:
                return "KNN(n_neighbors=" + std::to_string(n_neighbors) + ",p=" + std::to_string(p) + ")";
            case ModelFamily::LDA: return "LDA(shrinkage=" + std::to_string(shrinkage) + ")";
            case ModelFamily::Logit:
                return "Logit(C=" + std::to_string(C) + ",l1_ratio=" + std::to_string(l1_ratio) + ")";
            case ModelFamily::LinearSVM: return "LinearSVM(C=" + std::to_string(C) + ")";
            case ModelFamily::PLSDA: return "PLSDA(n_components=" + std::to_string(n_components) + ")";
            case ModelFamily::GNB: return "GNB()";
            case ModelFamily::QDA: return "QDA()";
        }
        return "unknown";
    }
};

namespace detail {

inline int class_count(const Labels& y) {
    int c = 0;
    for (int v : y) {
        if (v < 0) throw Error("labels must be non-negative class indices");
        c = std::max(c, v + 1);
    }
    return c;
}

// Argmax with ties to the lowest index; -inf entries mark absent classes.
inline int argmax(const Eigen::Ref<const Vector>& scores) {
    int best = -1;
    for (Eigen::Index c = 0; c < scores.size(); ++c) {
        if (!std::isfinite(scores(c)) && scores(c) < 0) continue;
        if (best < 0 || scores(c) > scores(best)) best = static_cast<int>(c);
    }
    return best < 0 ? 0 : best;
}

inline std::vector<std::vector<Eigen::Index>> members(const Labels& y, int classes) {
    std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(classes));
    for (std::size_t i = 0; i < y.size(); ++i) out[static_cast<std::size_t>(y[i])].push_back(static_cast<Eigen::Index>(i));
    return out;
}

inline Vector class_mean(const Matrix& x, const std::vector<Eigen::Index>& rows) {
    Vector m = Vector::Zero(x.cols());
    for (auto r : rows) m += x.row(r).transpose();
    return m / static_cast<double>(rows.size());
}

inline double largest_eigenvalue(const Matrix& gram) {
    // Power iteration on a symmetric positive semidefinite matrix.
    Vector v = Vector::Ones(gram.rows()).normalized();
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        Vector w = gram * v;
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        w /= norm;
        const double next = w.dot(gram * w);
        v = w;
        if (std::abs(next - lambda) <= 1e-10 * std::max(1.0, next)) return next;
        lambda = next;
    }
    return lambda;
}

struct KnnState {
    Matrix x;
    Labels y;
};

struct GaussianState {
    std::vector<bool> present;
    Matrix means;  // classes x features
    Matrix vars;   // GNB only
    Vector log_prior;
};

struct LdaState {
    std::vector<bool> present;
    Matrix coef;  // features x classes
    Vector bias;
};

struct QdaState {
    std::vector<bool> present;
    std::vector<Vector> means;
    std::vector<Eigen::LLT<Matrix>> chol;
    Vector log_det;
    Vector log_prior;
};

struct LinearState {
    Matrix w;  // features x classes
    Vector b;
};

struct PlsState {
    Vector x_mean;
    Vector y_mean;
    Matrix coef;  // features x classes
};

inline KnnState fit_knn(const Matrix& x, const Labels& y) { return {x, y}; }

inline Labels predict_knn(const KnnState& s, const ModelSpec& spec, int classes, const Matrix& x) {
    const Eigen::Index n = s.x.rows();
    const auto k = static_cast<Eigen::Index>(std::min<Eigen::Index>(spec.n_neighbors, n));
    Labels out(static_cast<std::size_t>(x.rows()));
    std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index t = 0; t < n; ++t) {
            const auto diff = (s.x.row(t) - x.row(i)).array();
            const double d = spec.p == 1 ? diff.abs().sum() : diff.square().sum();
            dist[static_cast<std::size_t>(t)] = {d, t};
        }
        // Pairs compare by distance then training index.
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        Vector votes = Vector::Zero(classes);
        for (Eigen::Index t = 0; t < k; ++t) votes(s.y[static_cast<std::size_t>(dist[static_cast<std::size_t>(t)].second)]) += 1.0;
        out[static_cast<std::size_t>(i)] = argmax(votes);
    }
    return out;
}

inline GaussianState fit_gnb(const Matrix& x, const Labels& y, int classes) {
    GaussianState s;
    const auto groups = members(y, classes);
    const Eigen::Index p = x.cols();
    s.present.assign(static_cast<std::size_t>(classes), false);
    s.means = Matrix::Zero(classes, p);
    s.vars = Matrix::Zero(classes, p);
    s.log_prior = Vector::Constant(classes, -std::numeric_limits<double>::infinity());
    const Vector all_mean = x.colwise().mean();
    const double max_var = ((x.rowwise() - all_mean.transpose()).array().square().colwise().sum() /
                            static_cast<double>(x.rows())).maxCoeff();
    const double floor = 1e-9 * std::max(max_var, 1e-300);
    for (int c = 0; c < classes; ++c) {
        const auto& rows = groups[static_cast<std::size_t>(c)];
        if (rows.empty()) continue;
        s.present[static_cast<std::size_t>(c)] = true;
        const Vector m = class_mean(x, rows);
        Vector v = Vector::Zero(p);
        for (auto r : rows) v += (x.row(r).transpose() - m).array().square().matrix();
        v /= static_cast<double>(rows.size());
        s.means.row(c) = m.transpose();
        s.vars.row(c) = (v.array() + floor).matrix().transpose();
        s.log_prior(c) = std::log(static_cast<double>(rows.size()) / static_cast<double>(x.rows()));
    }
    return s;
}

inline Labels predict_gnb(const GaussianState& s, const Matrix& x) {
    const auto classes = static_cast<int>(s.present.size());
    Labels out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        Vector score = Vector::Constant(classes, -std::numeric_limits<double>::infinity());
        for (int c = 0; c < classes; ++c) {
            if (!s.present[static_cast<std::size_t>(c)]) continue;
            const auto diff = (x.row(i) - s.means.row(c)).array();
            const auto var = s.vars.row(c).array();
            score(c) = s.log_prior(c) - 0.5 * ((diff.square() / var) + var.log()).sum();
        }
        out[static_cast<std::size_t>(i)] = argmax(score);
    }
    return out;
}

inline LdaState fit_lda(const Matrix& x, const Labels& y, int classes, double shrinkage) {
    const auto groups = members(y, classes);
    const Eigen::Index p = x.cols();
    Matrix pooled = Matrix::Zero(p, p);
    std::vector<Vector> means(static_cast<std::size_t>(classes));
    int present = 0;
    for (int c = 0; c < classes; ++c) {
        const auto& rows = groups[static_cast<std::size_t>(c)];
        if (rows.empty()) continue;
        ++present;
        means[static_cast<std::size_t>(c)] = class_mean(x, rows);
        for (auto r : rows) {
            const Vector d = x.row(r).transpose() - means[static_cast<std::size_t>(c)];
            pooled.noalias() += d * d.transpose();
        }
    }
    const double dof = std::max<double>(1.0, static_cast<double>(x.rows() - present));
    pooled /= dof;
    const double target = pooled.trace() / static_cast<double>(p);
    const Matrix cov = (1.0 - shrinkage) * pooled + shrinkage * target * Matrix::Identity(p, p);
    const Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success || !(target > 0.0)) {
        throw Error("LDA: pooled covariance singular after shrinkage");
    }
    LdaState s;
    s.present.assign(static_cast<std::size_t>(classes), false);
    s.coef = Matrix::Zero(p, classes);
    s.bias = Vector::Constant(classes, -std::numeric_limits<double>::infinity());
    for (int c = 0; c < classes; ++c) {
        const auto& rows = groups[static_cast<std::size_t>(c)];
        if (rows.empty()) continue;
        s.present[static_cast<std::size_t>(c)] = true;
        const Vector& m = means[static_cast<std::size_t>(c)];
        const Vector w = llt.solve(m);
        s.coef.col(c) = w;
        s.bias(c) = -0.5 * m.dot(w) + std::log(static_cast<double>(rows.size()) / static_cast<double>(x.rows()));
    }
    return s;
}

inline Labels predict_linear_scores(const Matrix& coef, const Vector& bias, const Matrix& x) {
    Labels out(static_cast<std::size_t>(x.rows()));
    const Matrix scores = (x * coef).rowwise() + bias.transpose();
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = argmax(scores.row(i).transpose());
    return out;
}

inline QdaState fit_qda(const Matrix& x, const Labels& y, int classes) {
    const auto groups = members(y, classes);
    const Eigen::Index p = x.cols();
    QdaState s;
    s.present.assign(static_cast<std::size_t>(classes), false);
    s.means.resize(static_cast<std::size_t>(classes));
    s.chol.resize(static_cast<std::size_t>(classes));
    s.log_det = Vector::Zero(classes);
    s.log_prior = Vector::Constant(classes, -std::numeric_limits<double>::infinity());
    for (int c = 0; c < classes; ++c) {
        const auto& rows = groups[static_cast<std::size_t>(c)];
        if (rows.empty()) continue;
        if (rows.size() < 2) throw Error("QDA: class " + std::to_string(c) + " has fewer than 2 samples");
        const Vector m = class_mean(x, rows);
        Matrix cov = Matrix::Zero(p, p);
        for (auto r : rows) {
            const Vector d = x.row(r).transpose() - m;
            cov.noalias() += d * d.transpose();
        }
        cov /= static_cast<double>(rows.size() - 1);
        const double floor = 1e-6 * cov.trace() / static_cast<double>(p);
        if (!(floor > 0.0)) throw Error("QDA: covariance of class " + std::to_string(c) + " is singular");
        cov.diagonal().array() += floor;
        Eigen::LLT<Matrix> llt(cov);
        if (llt.info() != Eigen::Success) throw Error("QDA: covariance of class " + std::to_string(c) + " is singular");
        s.present[static_cast<std::size_t>(c)] = true;
        s.means[static_cast<std::size_t>(c)] = m;
        s.log_det(c) = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        s.chol[static_cast<std::size_t>(c)] = std::move(llt);
        s.log_prior(c) = std::log(static_cast<double>(rows.size()) / static_cast<double>(x.rows()));
    }
    return s;
}

inline Labels predict_qda(const QdaState& s, const Matrix& x) {
    const auto classes = static_cast<int>(s.present.size());
    Labels out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        Vector score = Vector::Constant(classes, -std::numeric_limits<double>::infinity());
        for (int c = 0; c < classes; ++c) {
            if (!s.present[static_cast<std::size_t>(c)]) continue;
            const Vector d = x.row(i).transpose() - s.means[static_cast<std::size_t>(c)];
            const Vector z = s.chol[static_cast<std::size_t>(c)].matrixL().solve(d);
            score(c) = s.log_prior(c) - 0.5 * s.log_det(c) - 0.5 * z.squaredNorm();
        }
        out[static_cast<std::size_t>(i)] = argmax(score);
    }
    return out;
}

inline Matrix one_hot(const Labels& y, int classes) {
    Matrix t = Matrix::Zero(static_cast<Eigen::Index>(y.size()), classes);
    for (std::size_t i = 0; i < y.size(); ++i) t(static_cast<Eigen::Index>(i), y[i]) = 1.0;
    return t;
}

// Softmax negative log-likelihood (summed) and its gradient w.r.t. the scores.
inline double softmax_nll(const Matrix& scores, const Matrix& target, Matrix* grad) {
    double nll = 0.0;
    if (grad) grad->resize(scores.rows(), scores.cols());
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        const double top = scores.row(i).maxCoeff();
        const Eigen::RowVectorXd e = (scores.row(i).array() - top).exp().matrix();
        const double z = e.sum();
        nll += std::log(z) + top - scores.row(i).dot(target.row(i));
        if (grad) grad->row(i) = e / z - target.row(i);
    }
    return nll;
}

struct LinearFit {
    LinearState state;
    bool converged = true;
    int iterations = 0;
};

// Multinomial elastic net by accelerated proximal gradient (step 1/L,
// momentum restarted whenever the objective would rise).
inline LinearFit fit_logit(const Matrix& x, const Labels& y, int classes, double c_reg, double l1_ratio) {
    const Eigen::Index p = x.cols();
    const Matrix target = one_hot(y, classes);
    Matrix xb(x.rows(), p + 1);
    xb << x, Vector::Ones(x.rows());
    const double lipschitz = 0.5 * largest_eigenvalue(xb.transpose() * xb) + (1.0 - l1_ratio) / c_reg;
    const double step = 1.0 / std::max(lipschitz, 1e-12);
    const double l1 = l1_ratio / c_reg;
    const double l2 = (1.0 - l1_ratio) / c_reg;
    Matrix w = Matrix::Zero(p + 1, classes);  // last row is the unpenalized bias
    auto objective = [&](const Matrix& coef) {
        const double nll = softmax_nll(xb * coef, target, nullptr);
        const auto body = coef.topRows(p);
        return nll + l1 * body.cwiseAbs().sum() + 0.5 * l2 * body.squaredNorm();
    };
    double obj = objective(w);
    LinearFit fit;
    fit.converged = false;
    Matrix grad_scores;
    Matrix look = w;  // extrapolated point
    double momentum = 1.0;
    for (int it = 1; it <= 5000; ++it) {
        softmax_nll(xb * look, target, &grad_scores);
        Matrix grad = xb.transpose() * grad_scores;
        grad.topRows(p) += l2 * look.topRows(p);
        Matrix next = look - step * grad;
        const double thr = step * l1;
        next.topRows(p) = next.topRows(p).unaryExpr([thr](double v) {
            return v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
        });
        const double next_obj = objective(next);
        fit.iterations = it;
        if (next_obj > obj) {
            // Restart acceleration from the last accepted iterate.
            look = w;
            momentum = 1.0;
            continue;
        }
        const double decrease = obj - next_obj;
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        look = next + ((momentum - 1.0) / next_momentum) * (next - w);
        momentum = next_momentum;
        w = std::move(next);
        obj = next_obj;
        if (decrease < 1e-8 * std::max(1.0, obj)) {
            fit.converged = true;
            break;
        }
    }
    fit.state.w = w.topRows(p);
    fit.state.b = w.row(p).transpose();
    return fit;
}

// One-vs-rest hinge loss + L2, full-batch Pegasos subgradient steps with
// iterate averaging. The bias is a constant feature.
inline LinearFit fit_linear_svm(const Matrix& x, const Labels& y, int classes, double c_reg) {
    const Eigen::Index p = x.cols();
    const auto n = static_cast<double>(x.rows());
    Matrix xb(x.rows(), p + 1);
    xb << x, Vector::Ones(x.rows());
    const double lambda = 1.0 / (c_reg * n);
    const double radius = 1.0 / std::sqrt(lambda);
    LinearFit fit;
    fit.state.w = Matrix::Zero(p, classes);
    fit.state.b = Vector::Zero(classes);
    for (int c = 0; c < classes; ++c) {
        Vector sign(x.rows());
        for (Eigen::Index i = 0; i < x.rows(); ++i) sign(i) = y[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
        Vector w = Vector::Zero(p + 1);
        Vector avg = Vector::Zero(p + 1);
        auto primal = [&](const Vector& v) {
            const Vector margin = sign.cwiseProduct(xb * v);
            return 0.5 * lambda * v.squaredNorm() + (1.0 - margin.array()).max(0.0).sum() / n;
        };
        double last = std::numeric_limits<double>::infinity();
        bool done = false;
        int epoch = 1;
        for (; epoch <= 5000 && !done; ++epoch) {
            const Vector margin = sign.cwiseProduct(xb * w);
            const Vector active = (margin.array() < 1.0).select(sign, 0.0);
            const Vector sub = xb.transpose() * active;
            const double eta = 1.0 / (lambda * epoch);
            w = (1.0 - eta * lambda) * w + (eta / n) * sub;
            const double norm = w.norm();
            if (norm > radius) w *= radius / norm;
            avg += (w - avg) / static_cast<double>(epoch);
            if (epoch % 50 == 0) {
                const double obj = primal(avg);
                if (last - obj < 1e-4 * std::max(1.0, obj)) done = true;
                last = obj;
            }
        }
        if (!done) fit.converged = false;
        fit.iterations = std::max(fit.iterations, epoch - 1);
        fit.state.w.col(c) = avg.head(p);
        fit.state.b(c) = avg(p);
    }
    return fit;
}

// PLS2 by NIPALS on centred X and one-hot Y.
inline PlsState fit_plsda(const Matrix& x, const Labels& y, int classes, int n_components) {
    PlsState s;
    s.x_mean = x.colwise().mean();
    const Matrix target = one_hot(y, classes);
    s.y_mean = target.colwise().mean();
    Matrix e = x.rowwise() - s.x_mean.transpose();
    Matrix f = target.rowwise() - s.y_mean.transpose();
    const Eigen::Index p = x.cols();
    const int a_max = static_cast<int>(std::min<Eigen::Index>({n_components, p, x.rows() - 1}));
    Matrix w_all(p, 0), p_all(p, 0), q_all(classes, 0);
    for (int a = 0; a < a_max; ++a) {
        if (e.squaredNorm() < 1e-20 || f.squaredNorm() < 1e-20) break;
        Eigen::Index col = 0;
        f.colwise().squaredNorm().maxCoeff(&col);
        Vector u = f.col(col);
        Vector t_old = Vector::Zero(x.rows());
        Vector w, t, q;
        for (int it = 0; it < 500; ++it) {
            w = e.transpose() * u;
            const double wn = w.norm();
            if (wn == 0.0) break;
            w /= wn;
            t = e * w;
            q = f.transpose() * t / t.squaredNorm();
            const double qn = q.squaredNorm();
            if (qn == 0.0) break;
            u = f * q / qn;
            if ((t - t_old).norm() <= 1e-12 * std::max(1.0, t.norm())) break;
            t_old = t;
        }
        if (w.size() == 0 || t.size() == 0 || t.squaredNorm() == 0.0) break;
        const Vector load = e.transpose() * t / t.squaredNorm();
        e -= t * load.transpose();
        f -= t * q.transpose();
        w_all.conservativeResize(Eigen::NoChange, w_all.cols() + 1);
        p_all.conservativeResize(Eigen::NoChange, p_all.cols() + 1);
        q_all.conservativeResize(Eigen::NoChange, q_all.cols() + 1);
        w_all.col(w_all.cols() - 1) = w;
        p_all.col(p_all.cols() - 1) = load;
        q_all.col(q_all.cols() - 1) = q;
    }
    if (w_all.cols() == 0) {
        s.coef = Matrix::Zero(p, classes);
        return s;
    }
    const Matrix ptw = p_all.transpose() * w_all;
    s.coef = w_all * ptw.fullPivLu().solve(q_all.transpose());
    return s;
}

inline Labels predict_plsda(const PlsState& s, const Matrix& x) {
    const Matrix centred = x.rowwise() - s.x_mean.transpose();
    return predict_linear_scores(s.coef, s.y_mean, centred);
}

}  // namespace detail

class TrainedModel {
 public:
    TrainedModel(ModelSpec spec, int classes) : spec_(spec), classes_(classes) {}

    const ModelSpec& spec() const noexcept { return spec_; }
    int classes() const noexcept { return classes_; }
    bool converged() const noexcept { return converged_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    Labels predict(const Matrix& x) const {
        return std::visit(
            [&](const auto& s) -> Labels {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, detail::KnnState>) {
                    return detail::predict_knn(s, spec_, classes_, x);
                } else if constexpr (std::is_same_v<T, detail::GaussianState>) {
                    return detail::predict_gnb(s, x);
                } else if constexpr (std::is_same_v<T, detail::LdaState>) {
                    return detail::predict_linear_scores(s.coef, s.bias, x);
                } else if constexpr (std::is_same_v<T, detail::QdaState>) {
                    return detail::predict_qda(s, x);
                } else if constexpr (std::is_same_v<T, detail::LinearState>) {
                    return detail::predict_linear_scores(s.w, s.b, x);
                } else if constexpr (std::is_same_v<T, detail::PlsState>) {
                    return detail::predict_plsda(s, x);
                } else {
                    throw Error("model not fitted");
                }
            },
            state_);
    }

 private:
    friend TrainedModel fit(const ModelSpec&, const Matrix&, const Labels&, int);

    ModelSpec spec_;
    int classes_;
    bool converged_ = true;
    std::vector<std::string> warnings_;
    std::variant<std::monostate, detail::KnnState, detail::GaussianState, detail::LdaState, detail::QdaState,
                 detail::LinearState, detail::PlsState>
        state_;
};

// classes = 0 infers the class count from the labels.
inline TrainedModel fit(const ModelSpec& spec, const Matrix& x, const Labels& y, int classes = 0) {
    spec.validate();
    if (x.rows() == 0) throw Error("fit: empty training set");
    if (static_cast<std::size_t>(x.rows()) != y.size()) throw Error("fit: X rows and labels differ");
    if (!x.allFinite()) throw Error("fit: non-finite feature values");
    if (classes <= 0) classes = detail::class_count(y);
    TrainedModel model(spec, classes);
    switch (spec.family) {
        case ModelFamily::KNN: model.state_ = detail::fit_knn(x, y); break;
        case ModelFamily::GNB: model.state_ = detail::fit_gnb(x, y, classes); break;
        case ModelFamily::LDA: model.state_ = detail::fit_lda(x, y, classes, spec.shrinkage); break;
        case ModelFamily::QDA: model.state_ = detail::fit_qda(x, y, classes); break;
        case ModelFamily::Logit: {
            auto f = detail::fit_logit(x, y, classes, spec.C, spec.l1_ratio);
            model.converged_ = f.converged;
            if (!f.converged) model.warnings_.push_back("Logit: iteration cap reached");
            model.state_ = std::move(f.state);
            break;
        }
        case ModelFamily::LinearSVM: {
            auto f = detail::fit_linear_svm(x, y, classes, spec.C);
            model.converged_ = f.converged;
            if (!f.converged) model.warnings_.push_back("LinearSVM: epoch cap reached");
            model.state_ = std::move(f.state);
            break;
        }
        case ModelFamily::PLSDA: model.state_ = detail::fit_plsda(x, y, classes, spec.n_components); break;
    }
    return model;
}

inline Labels predict(const TrainedModel& model, const Matrix& x) { return model.predict(x); }

inline double accuracy(const Labels& truth, const Labels& pred) {
    if (truth.size() != pred.size() || truth.empty()) throw Error("accuracy: size mismatch or empty");
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == pred[i] ? 1 : 0;
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace wavescale::classify
