#ifndef METASELECT_SVM_HPP
#define METASELECT_SVM_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace metaselect {

/// gamma = 1 / (n_features * Var(X)), the auto-scaled RBF coefficient.
double rbf_gamma_scale(const Eigen::MatrixXd& X);

double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double gamma);

struct SvmConfig {
    double C = 1.0;
    double gamma = 1.0;
    double tol = 1e-3;
    double epsilon = 0.1;  // epsilon-insensitive tube (SVR only)
    std::size_t max_iter = 10'000'000;
};

/// RBF kernel max-margin classifier trained by sequential minimal
/// optimization on the dual problem. Labels are 0/1.
class KernelSvc {
public:
    void fit(const Eigen::MatrixXd& X, const std::vector<int>& y, const SvmConfig& cfg);
    double decision(const Eigen::VectorXd& x) const;
    int predict(const Eigen::VectorXd& x) const;

private:
    Eigen::MatrixXd support_vectors_;
    std::vector<double> dual_coef_;  // y_i * alpha_i
    double bias_ = 0.0;
    double gamma_ = 1.0;
};

/// Epsilon-insensitive RBF kernel regression (SMO on the expanded dual).
class KernelSvr {
public:
    void fit(const Eigen::MatrixXd& X, const std::vector<double>& z, const SvmConfig& cfg);
    double predict(const Eigen::VectorXd& x) const;

    const Eigen::MatrixXd& support_vectors() const { return support_vectors_; }
    const std::vector<double>& dual_coef() const { return dual_coef_; }
    double bias() const { return bias_; }
    double gamma() const { return gamma_; }

    /// Rebuild a fitted model from its parameters (used by model import).
    void restore(Eigen::MatrixXd support_vectors, std::vector<double> dual_coef,
                 double bias, double gamma);

private:
    Eigen::MatrixXd support_vectors_;
    std::vector<double> dual_coef_;  // beta_i = alpha_i - alpha*_i
    double bias_ = 0.0;
    double gamma_ = 1.0;
};

}  // namespace metaselect

#endif
