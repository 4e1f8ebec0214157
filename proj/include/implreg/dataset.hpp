#pragma once

#include "implreg/problem.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>

namespace implreg {

// Designs are generated in column blocks of this width; each block has its own
// derived stream, so the streaming Gram route sees exactly the same X.
inline constexpr std::size_t design_block_width = 256;

void fill_design_block(const ProblemInstance& problem, std::size_t n, std::uint64_t seed,
                       std::size_t block, Eigen::Ref<Eigen::MatrixXd> out);

class Dataset {
public:
    Dataset(Eigen::MatrixXd X, Eigen::VectorXd y, std::optional<Eigen::VectorXd> noise = std::nullopt);

    Eigen::Index n() const { return X_.rows(); }
    Eigen::Index d() const { return X_.cols(); }
    const Eigen::MatrixXd& X() const { return X_; }
    const Eigen::VectorXd& y() const { return y_; }
    const std::optional<Eigen::VectorXd>& noise() const { return noise_; }

    // Thin SVD, X = U diag(s) Vᵀ, singular values descending.
    const Eigen::VectorXd& singular_values() const { return s_; }
    const Eigen::MatrixXd& U() const { return U_; }
    const Eigen::MatrixXd& V() const { return V_; }
    // Number of singular values above max(n,d)·eps·s_max.
    Eigen::Index rank() const { return rank_; }

    const Eigen::MatrixXd& gram() const { return gram_; }
    double gram_norm() const { return s_.size() ? s_[0] * s_[0] : 0.0; }

private:
    Eigen::MatrixXd X_;
    Eigen::VectorXd y_;
    std::optional<Eigen::VectorXd> noise_;
    Eigen::VectorXd s_;
    Eigen::MatrixXd U_, V_;
    Eigen::MatrixXd gram_;
    Eigen::Index rank_ = 0;
};

Dataset sample_dataset(const ProblemInstance& problem, std::size_t n, std::uint64_t seed);

// The design part of sample_dataset alone.
Eigen::MatrixXd sample_design(const ProblemInstance& problem, std::size_t n, std::uint64_t seed);

}  // namespace implreg
