#pragma once

// Per-draw design factorizations used by the Monte Carlo layers.

#include "implreg/problem.hpp"
#include "implreg/spectral.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace implreg::detail {

struct Draw {
    DesignSpectrum ds;
    std::vector<SignalCoords> signals;
    bool exact = false;
};

inline bool prefer_exact(std::size_t n, std::size_t d, double flops_limit) {
    const double lo = static_cast<double>(n < d ? n : d), hi = static_cast<double>(n < d ? d : n);
    return lo * lo * hi <= flops_limit;
}

Draw draw_design(const ProblemInstance& problem, std::size_t n, std::uint64_t seed,
                 std::span<const Eigen::VectorXd> wstars, bool exact);

}  // namespace implreg::detail
