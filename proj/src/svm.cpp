#include "metaselect/svm.hpp"

#include "metaselect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <unordered_map>

namespace metaselect {

double rbf_gamma_scale(const Eigen::MatrixXd& X) {
    const double n = static_cast<double>(X.size());
    const double mean = X.sum() / n;
    const double var = (X.array() - mean).square().sum() / n;
    const double d = static_cast<double>(X.cols());
    if (var <= 0.0 || d <= 0.0) return d > 0.0 ? 1.0 / d : 1.0;
    return 1.0 / (d * var);
}

double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double gamma) {
    return std::exp(-gamma * (a - b).squaredNorm());
}

namespace {

constexpr double kTau = 1e-12;

/// SMO solver for: min 1/2 a'Qa + p'a  s.t.  y'a = 0, 0 <= a_i <= C,
/// with Q_ij = y_i y_j K(i,j). Maximal-violating-pair working set selection.
class SmoSolver {
public:
    SmoSolver(const Eigen::MatrixXd& points, const std::vector<signed char>& y,
              const std::vector<double>& p, double C, double gamma, double tol,
              std::size_t max_iter)
        : points_(points), y_(y), p_(p), C_(C), gamma_(gamma), tol_(tol),
          max_iter_(max_iter), n_(y.size()) {}

    void solve(std::vector<double>& alpha, double& rho) {
        alpha.assign(n_, 0.0);
        grad_ = p_;

        // Row norms once; kernel rows cached on demand.
        sq_norms_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            sq_norms_[i] = points_.row(point_index(i)).squaredNorm();
        }

        for (std::size_t iter = 0; iter < max_iter_; ++iter) {
            auto [i, j, gap] = select_working_set(alpha);
            if (gap < tol_) break;

            const std::vector<double>& Qi = q_row(i);
            const std::vector<double>& Qj = q_row(j);

            double old_ai = alpha[i];
            double old_aj = alpha[j];
            if (y_[i] != y_[j]) {
                double quad = Qi[i] + Qj[j] + 2.0 * Qi[j];
                if (quad <= 0) quad = kTau;
                double delta = (-grad_[i] - grad_[j]) / quad;
                double diff = alpha[i] - alpha[j];
                alpha[i] += delta;
                alpha[j] += delta;
                if (diff > 0) {
                    if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
                } else {
                    if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
                }
                if (diff > 0) {
                    if (alpha[i] > C_) { alpha[i] = C_; alpha[j] = C_ - diff; }
                } else {
                    if (alpha[j] > C_) { alpha[j] = C_; alpha[i] = C_ + diff; }
                }
            } else {
                double quad = Qi[i] + Qj[j] - 2.0 * Qi[j];
                if (quad <= 0) quad = kTau;
                double delta = (grad_[i] - grad_[j]) / quad;
                double sum = alpha[i] + alpha[j];
                alpha[i] -= delta;
                alpha[j] += delta;
                if (sum > C_) {
                    if (alpha[i] > C_) { alpha[i] = C_; alpha[j] = sum - C_; }
                } else {
                    if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
                }
                if (sum > C_) {
                    if (alpha[j] > C_) { alpha[j] = C_; alpha[i] = sum - C_; }
                } else {
                    if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
                }
            }

            double di = alpha[i] - old_ai;
            double dj = alpha[j] - old_aj;
            if (di == 0.0 && dj == 0.0) break;
            for (std::size_t t = 0; t < n_; ++t) {
                grad_[t] += Qi[t] * di + Qj[t] * dj;
            }
        }

        rho = calculate_rho(alpha);
    }

protected:
    // Expanded problems (SVR) map two dual variables onto one data point.
    virtual std::size_t point_index(std::size_t t) const { return t; }

private:
    std::tuple<std::size_t, std::size_t, double> select_working_set(
        const std::vector<double>& alpha) const {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t i = 0, j = 0;
        for (std::size_t t = 0; t < n_; ++t) {
            const double v = -static_cast<double>(y_[t]) * grad_[t];
            const bool in_up = (y_[t] == 1 && alpha[t] < C_) || (y_[t] == -1 && alpha[t] > 0);
            const bool in_low = (y_[t] == 1 && alpha[t] > 0) || (y_[t] == -1 && alpha[t] < C_);
            if (in_up && v > gmax) { gmax = v; i = t; }
            if (in_low && v < gmin) { gmin = v; j = t; }
        }
        return {i, j, gmax - gmin};
    }

    const std::vector<double>& q_row(std::size_t i) {
        auto it = cache_.find(i);
        if (it != cache_.end()) return it->second;
        if (cache_.size() >= cache_cap()) cache_.clear();
        std::vector<double> row(n_);
        const auto pi = point_index(i);
        Eigen::VectorXd dots = points_ * points_.row(pi).transpose();
        for (std::size_t t = 0; t < n_; ++t) {
            const auto pt = point_index(t);
            double k = std::exp(-gamma_ * (sq_norms_[i] + sq_norms_[t] -
                                           2.0 * dots(static_cast<Eigen::Index>(pt))));
            row[t] = static_cast<double>(y_[i]) * static_cast<double>(y_[t]) * k;
        }
        return cache_.emplace(i, std::move(row)).first->second;
    }

    std::size_t cache_cap() const {
        // ~256 MB of cached rows
        std::size_t rows = (256ull << 20) / (n_ * sizeof(double) + 64);
        return rows < 2 ? 2 : rows;
    }

    double calculate_rho(const std::vector<double>& alpha) const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t nr_free = 0;
        for (std::size_t t = 0; t < n_; ++t) {
            const double yg = static_cast<double>(y_[t]) * grad_[t];
            if (alpha[t] >= C_) {
                if (y_[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
            } else if (alpha[t] <= 0) {
                if (y_[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
            } else {
                ++nr_free;
                sum_free += yg;
            }
        }
        return nr_free > 0 ? sum_free / static_cast<double>(nr_free) : (ub + lb) / 2.0;
    }

    const Eigen::MatrixXd& points_;
    const std::vector<signed char>& y_;
    std::vector<double> p_;
    double C_;
    double gamma_;
    double tol_;
    std::size_t max_iter_;
    std::size_t n_;
    std::vector<double> grad_;
    std::vector<double> sq_norms_;
    std::unordered_map<std::size_t, std::vector<double>> cache_;
};

class SvrSmoSolver : public SmoSolver {
public:
    using SmoSolver::SmoSolver;
    void set_point_count(std::size_t l) { l_ = l; }

protected:
    std::size_t point_index(std::size_t t) const override { return t < l_ ? t : t - l_; }

private:
    std::size_t l_ = 0;
};

}  // namespace

void KernelSvc::fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                    const SvmConfig& cfg) {
    const std::size_t n = static_cast<std::size_t>(X.rows());
    if (n != y.size()) throw DataError("KernelSvc::fit: X/y size mismatch");
    gamma_ = cfg.gamma;

    std::vector<signed char> sy(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        sy[i] = y[i] == 1 ? 1 : -1;
        (y[i] == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) throw DataError("KernelSvc::fit: both classes required");

    std::vector<double> p(n, -1.0);
    SmoSolver solver(X, sy, p, cfg.C, cfg.gamma, cfg.tol, cfg.max_iter);
    std::vector<double> alpha;
    double rho = 0.0;
    solver.solve(alpha, rho);
    bias_ = -rho;

    std::vector<std::size_t> sv;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 0) sv.push_back(i);
    }
    support_vectors_.resize(static_cast<Eigen::Index>(sv.size()), X.cols());
    dual_coef_.resize(sv.size());
    for (std::size_t k = 0; k < sv.size(); ++k) {
        support_vectors_.row(static_cast<Eigen::Index>(k)) = X.row(static_cast<Eigen::Index>(sv[k]));
        dual_coef_[k] = static_cast<double>(sy[sv[k]]) * alpha[sv[k]];
    }
}

double KernelSvc::decision(const Eigen::VectorXd& x) const {
    double sum = bias_;
    for (Eigen::Index k = 0; k < support_vectors_.rows(); ++k) {
        sum += dual_coef_[static_cast<std::size_t>(k)] *
               rbf_kernel(support_vectors_.row(k).transpose(), x, gamma_);
    }
    return sum;
}

int KernelSvc::predict(const Eigen::VectorXd& x) const {
    // ties go to the negative (normal) class
    return decision(x) > 0.0 ? 1 : 0;
}

void KernelSvr::fit(const Eigen::MatrixXd& X, const std::vector<double>& z,
                    const SvmConfig& cfg) {
    const std::size_t l = static_cast<std::size_t>(X.rows());
    if (l != z.size()) throw DataError("KernelSvr::fit: X/z size mismatch");
    gamma_ = cfg.gamma;

    // Expanded dual: variables [alpha; alpha*] with signs [+1; -1].
    std::vector<signed char> sy(2 * l);
    std::vector<double> p(2 * l);
    for (std::size_t i = 0; i < l; ++i) {
        sy[i] = 1;
        p[i] = cfg.epsilon - z[i];
        sy[l + i] = -1;
        p[l + i] = cfg.epsilon + z[i];
    }
    SvrSmoSolver solver(X, sy, p, cfg.C, cfg.gamma, cfg.tol, cfg.max_iter);
    solver.set_point_count(l);
    std::vector<double> alpha;
    double rho = 0.0;
    solver.solve(alpha, rho);
    bias_ = -rho;

    std::vector<std::size_t> sv;
    std::vector<double> beta(l);
    for (std::size_t i = 0; i < l; ++i) {
        beta[i] = alpha[i] - alpha[l + i];
        if (beta[i] != 0.0) sv.push_back(i);
    }
    support_vectors_.resize(static_cast<Eigen::Index>(sv.size()), X.cols());
    dual_coef_.resize(sv.size());
    for (std::size_t k = 0; k < sv.size(); ++k) {
        support_vectors_.row(static_cast<Eigen::Index>(k)) = X.row(static_cast<Eigen::Index>(sv[k]));
        dual_coef_[k] = beta[sv[k]];
    }
}

double KernelSvr::predict(const Eigen::VectorXd& x) const {
    double sum = bias_;
    for (Eigen::Index k = 0; k < support_vectors_.rows(); ++k) {
        sum += dual_coef_[static_cast<std::size_t>(k)] *
               rbf_kernel(support_vectors_.row(k).transpose(), x, gamma_);
    }
    return sum;
}

void KernelSvr::restore(Eigen::MatrixXd support_vectors, std::vector<double> dual_coef,
                        double bias, double gamma) {
    if (static_cast<std::size_t>(support_vectors.rows()) != dual_coef.size()) {
        throw ConfigError("KernelSvr::restore: coefficient count mismatch");
    }
    support_vectors_ = std::move(support_vectors);
    dual_coef_ = std::move(dual_coef);
    bias_ = bias;
    gamma_ = gamma;
}

}  // namespace metaselect
