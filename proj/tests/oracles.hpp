#pragma once

// Dense, deliberately naive reference computations used as test oracles.
// Nothing here calls into the library's spectral machinery.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

inline Eigen::MatrixXd gaussian_matrix(std::mt19937_64& eng, Eigen::Index rows, Eigen::Index cols,
                                       const Eigen::VectorXd& col_var) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = std::sqrt(col_var[j]) * nd(eng);
    return m;
}

inline Eigen::VectorXd gaussian_vector(std::mt19937_64& eng, Eigen::Index size, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v[i] = scale * nd(eng);
    return v;
}

inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& a) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    return cod.pseudoInverse();
}

// Linear map y ↦ ŵ for ridge with the (XᵀX + nλI) normalisation.
inline Eigen::MatrixXd ridge_map(const Eigen::MatrixXd& X, double lambda) {
    const double n = static_cast<double>(X.rows());
    if (lambda == 0.0) return pinv(X);
    Eigen::MatrixXd a = X.transpose() * X;
    a.diagonal().array() += n * lambda;
    return a.ldlt().solve(X.transpose());
}

// Linear map for t full-batch GD steps w ← w − (η/n)Xᵀ(Xw − y) from zero.
inline Eigen::MatrixXd gd_map(const Eigen::MatrixXd& X, double eta, std::int64_t t) {
    const double n = static_cast<double>(X.rows());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(X.cols(), X.rows());
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(X.rows(), X.rows());
    for (std::int64_t k = 0; k < t; ++k) m += (eta / n) * X.transpose() * (eye - X * m);
    return m;
}

inline Eigen::VectorXd gd_iterate(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double eta, std::int64_t t) {
    const double n = static_cast<double>(X.rows());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(X.cols());
    for (std::int64_t k = 0; k < t; ++k) w -= (eta / n) * X.transpose() * (X * w - y);
    return w;
}

struct Split {
    double bias;
    double variance;
};

// E_ε ‖M(Xw* + ε) − w*‖²_S for a covariance S.
inline Split linear_risk(const Eigen::MatrixXd& M, const Eigen::MatrixXd& X, const Eigen::VectorXd& wstar,
                         const Eigen::MatrixXd& S, double sigma2) {
    const Eigen::VectorXd r = M * X * wstar - wstar;
    return {r.dot(S * r), sigma2 * (M.transpose() * S * M).trace()};
}

inline double quad(const Eigen::VectorXd& v, const Eigen::MatrixXd& S) { return v.dot(S * v); }

struct MeanSe {
    double mean;
    double se;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    s2 /= static_cast<double>(v.size() - 1);
    return {m, std::sqrt(s2 / static_cast<double>(v.size()))};
}

// Last-iterate SGD with the step-halving schedule, simulated path by path.
inline double sgd_path_loss(std::mt19937_64& eng, const Eigen::VectorXd& lambda, const Eigen::VectorXd& wstar,
                            double sigma2, std::size_t n, double eta0) {
    std::normal_distribution<double> nd(0.0, 1.0);
    const Eigen::Index d = lambda.size();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d), x(d);
    const double ln = std::log(static_cast<double>(n));
    for (std::size_t s = 1; s <= n; ++s) {
        const int stage = n < 2 ? 0 : static_cast<int>(std::floor(static_cast<double>(s) * ln / static_cast<double>(n)));
        const double eta = eta0 * std::pow(0.5, stage);
        for (Eigen::Index j = 0; j < d; ++j) x[j] = std::sqrt(lambda[j]) * nd(eng);
        const double y = x.dot(wstar) + std::sqrt(sigma2) * nd(eng);
        w -= eta * (x.dot(w) - y) * x;
    }
    const Eigen::VectorXd e = w - wstar;
    return (lambda.array() * e.array().square()).sum();
}

// Smallest k with offset + w·Σ_{i>k}λ_i/n ≥ c·λ_{k+1} (λ_{d+1} := 0), by direct summation.
inline std::size_t brute_index(const std::vector<double>& lam, std::size_t n, double offset, double w, double c) {
    for (std::size_t k = 0;; ++k) {
        double tail = 0.0;
        for (std::size_t i = k; i < lam.size(); ++i) tail += lam[i];
        const double next = k < lam.size() ? lam[k] : 0.0;
        if (offset + w * tail / static_cast<double>(n) >= c * next) return k;
    }
}

inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

}  // namespace oracle
