#include "draws.hpp"

#include "implreg/dataset.hpp"

namespace implreg::detail {

Draw draw_design(const ProblemInstance& problem, std::size_t n, std::uint64_t seed,
                 std::span<const Eigen::VectorXd> wstars, bool exact) {
    Draw out;
    out.exact = exact;
    if (!exact) {
        auto sd = stream_design(problem, n, seed, wstars);
        out.ds = std::move(sd.spectrum);
        out.signals = std::move(sd.signals);
        return out;
    }
    Eigen::MatrixXd X = sample_design(problem, n, seed);
    Dataset data(std::move(X), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
    out.ds = design_spectrum(data, problem.spectrum);
    const Eigen::Index r = data.rank();
    auto Vr = data.V().leftCols(r);
    const Eigen::VectorXd lam = problem.spectrum.vector();
    for (const auto& w : wstars) {
        SignalCoords sc;
        sc.a = Vr.transpose() * w;
        sc.b = Vr.transpose() * lam.cwiseProduct(w);
        double e = 0.0;
        for (Eigen::Index i = lam.size(); i-- > 0;) e += lam[i] * w[i] * w[i];
        sc.energy = e;
        out.signals.push_back(std::move(sc));
    }
    return out;
}

}  // namespace implreg::detail
