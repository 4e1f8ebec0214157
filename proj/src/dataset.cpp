#include "implreg/dataset.hpp"

#include "implreg/errors.hpp"
#include "implreg/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace implreg {

void fill_design_block(const ProblemInstance& problem, std::size_t n, std::uint64_t seed, std::size_t block,
                       Eigen::Ref<Eigen::MatrixXd> out) {
    const std::size_t d = problem.dim();
    const std::size_t begin = block * design_block_width;
    const std::size_t end = std::min(d, begin + design_block_width);
    if (begin >= d || static_cast<std::size_t>(out.rows()) != n ||
        static_cast<std::size_t>(out.cols()) != end - begin)
        throw ValidationError("design block shape mismatch");
    Engine eng = make_engine(derive_seed(seed, Stream::design, block));
    if (problem.design == Design::gaussian) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t j = begin; j < end; ++j) {
            const double scale = std::sqrt(problem.spectrum[j]);
            auto col = out.col(static_cast<Eigen::Index>(j - begin));
            for (Eigen::Index i = 0; i < col.size(); ++i) col[i] = scale * normal(eng);
        }
    } else {
        for (std::size_t j = begin; j < end; ++j) {
            const double scale = std::sqrt(problem.spectrum[j]);
            auto col = out.col(static_cast<Eigen::Index>(j - begin));
            for (Eigen::Index i = 0; i < col.size(); ++i) col[i] = (eng() >> 63) ? scale : -scale;
        }
    }
}

Eigen::MatrixXd sample_design(const ProblemInstance& problem, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw ValidationError("sample size n must be at least 1");
    const std::size_t d = problem.dim();
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    const std::size_t blocks = (d + design_block_width - 1) / design_block_width;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t begin = b * design_block_width;
        const std::size_t width = std::min(d, begin + design_block_width) - begin;
        fill_design_block(problem, n, seed, b,
                          X.middleCols(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(width)));
    }
    return X;
}

Dataset sample_dataset(const ProblemInstance& problem, std::size_t n, std::uint64_t seed) {
    problem.validate();
    Eigen::MatrixXd X = sample_design(problem, n, seed);
    Engine eng = make_engine(derive_seed(seed, Stream::noise));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma = std::sqrt(problem.sigma2);
    Eigen::VectorXd eps(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = sigma * normal(eng);
    Eigen::VectorXd y = X * problem.wstar + eps;
    return Dataset(std::move(X), std::move(y), std::move(eps));
}

Dataset::Dataset(Eigen::MatrixXd X, Eigen::VectorXd y, std::optional<Eigen::VectorXd> noise)
    : X_(std::move(X)), y_(std::move(y)), noise_(std::move(noise)) {
    if (y_.size() != X_.rows()) throw ValidationError("response length does not match the number of rows of X");
    if (noise_ && noise_->size() != X_.rows()) throw ValidationError("noise length does not match X");
    if (!X_.allFinite() || !y_.allFinite()) throw ValidationError("dataset contains non-finite values");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(X_, Eigen::ComputeThinU | Eigen::ComputeThinV);
    s_ = svd.singularValues();
    U_ = svd.matrixU();
    V_ = svd.matrixV();
    const double cutoff = static_cast<double>(std::max(X_.rows(), X_.cols())) *
                          std::numeric_limits<double>::epsilon() * (s_.size() ? s_[0] : 0.0);
    rank_ = 0;
    while (rank_ < s_.size() && s_[rank_] > cutoff) ++rank_;
    gram_.resize(X_.rows(), X_.rows());
    gram_.setZero();
    gram_.selfadjointView<Eigen::Lower>().rankUpdate(X_);
    gram_.triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
}

}  // namespace implreg
