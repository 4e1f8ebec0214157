#include "implreg/spectral.hpp"

#include "implreg/errors.hpp"
#include "implreg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace implreg {

bool DesignSpectrum::reliable(double rho) const {
    if (tolerance <= 0.0 || eig.size() == 0) return true;
    return rho + eig[eig.size() - 1] >= tolerance * gram_norm;
}

double DesignSpectrum::max_stable_stepsize() const {
    return gram_norm > 0.0 ? static_cast<double>(n) / gram_norm : std::numeric_limits<double>::infinity();
}

DesignSpectrum design_spectrum(const Dataset& data, const Spectrum& spectrum) {
    if (static_cast<std::size_t>(data.d()) != spectrum.size())
        throw ValidationError("dataset dimension does not match the spectrum");
    DesignSpectrum ds;
    ds.n = static_cast<std::size_t>(data.n());
    const Eigen::Index r = data.rank();
    ds.eig = data.singular_values().head(r).array().square();
    ds.gram_norm = data.gram_norm();
    Eigen::MatrixXd W = spectrum.vector().array().sqrt().matrix().asDiagonal() * data.V().leftCols(r);
    ds.cov = W.transpose() * W;
    return ds;
}

SignalCoords signal_coords(const Dataset& data, const ProblemInstance& problem) {
    const Eigen::Index r = data.rank();
    SignalCoords sc;
    auto Vr = data.V().leftCols(r);
    sc.a = Vr.transpose() * problem.wstar;
    sc.b = Vr.transpose() * (problem.spectrum.vector().array() * problem.wstar.array()).matrix();
    sc.energy = problem.signal_energy();
    return sc;
}

StreamedDesign stream_design(const ProblemInstance& problem, std::size_t n, std::uint64_t seed,
                             std::span<const Eigen::VectorXd> wstars) {
    const std::size_t d = problem.dim();
    const auto N = static_cast<Eigen::Index>(n);
    const auto K = static_cast<Eigen::Index>(wstars.size());
    Eigen::MatrixXd Wmat(static_cast<Eigen::Index>(d), K);
    for (Eigen::Index k = 0; k < K; ++k) {
        if (static_cast<std::size_t>(wstars[k].size()) != d) throw ValidationError("w* length mismatch");
        Wmat.col(k) = wstars[k];
    }
    const Eigen::VectorXd lam = problem.spectrum.vector();
    Eigen::MatrixXd SW = lam.asDiagonal() * Wmat;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N), B = Eigen::MatrixXd::Zero(N, N);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, K), Q = Eigen::MatrixXd::Zero(N, K);
    Eigen::MatrixXd Xb, Xs;
    const std::size_t blocks = (d + design_block_width - 1) / design_block_width;
    for (std::size_t blk = 0; blk < blocks; ++blk) {
        const auto begin = static_cast<Eigen::Index>(blk * design_block_width);
        const auto width = static_cast<Eigen::Index>(std::min(d, blk * design_block_width + design_block_width)) - begin;
        Xb.resize(N, width);
        fill_design_block(problem, n, seed, blk, Xb);
        A.selfadjointView<Eigen::Lower>().rankUpdate(Xb);
        Xs = Xb * lam.segment(begin, width).array().sqrt().matrix().asDiagonal();
        B.selfadjointView<Eigen::Lower>().rankUpdate(Xs);
        P.noalias() += Xb * Wmat.middleRows(begin, width);
        Q.noalias() += Xb * SW.middleRows(begin, width);
    }
    B.triangularView<Eigen::StrictlyUpper>() = B.transpose();

    SymmetricEigen es = symmetric_eigen(std::move(A));
    StreamedDesign out;
    DesignSpectrum& ds = out.spectrum;
    ds.n = n;
    ds.tolerance = gram_route_tolerance;
    ds.gram_norm = std::max(es.values.size() ? es.values[0] : 0.0, 0.0);
    const double cutoff = 64.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * ds.gram_norm;
    Eigen::Index r = 0;
    while (r < es.values.size() && es.values[r] > cutoff) ++r;
    ds.eig = es.values.head(r);
    auto Ur = es.vectors.leftCols(r);
    const Eigen::ArrayXd s = ds.eig.array().sqrt();
    Eigen::MatrixXd BU = B * Ur;
    ds.cov.noalias() = Ur.transpose() * BU;
    ds.cov.array().colwise() /= s;
    ds.cov.array().rowwise() /= s.transpose();
    Eigen::MatrixXd Pa = Ur.transpose() * P, Qb = Ur.transpose() * Q;
    Pa.array().colwise() /= s;
    Qb.array().colwise() /= s;
    out.signals.resize(wstars.size());
    for (Eigen::Index k = 0; k < K; ++k) {
        auto& sc = out.signals[static_cast<std::size_t>(k)];
        sc.a = Pa.col(k);
        sc.b = Qb.col(k);
        double e = 0.0;
        for (std::size_t i = d; i-- > 0;) e += lam[static_cast<Eigen::Index>(i)] * Wmat(static_cast<Eigen::Index>(i), k) * Wmat(static_cast<Eigen::Index>(i), k);
        sc.energy = e;
    }
    return out;
}

Eigen::VectorXd ridge_filter(const DesignSpectrum& ds, double lambda) {
    if (!(lambda >= 0.0)) throw ValidationError("ridge lambda must be nonnegative");
    const double rho = ridge_level(ds.n, lambda);
    if (lambda == 0.0) return Eigen::VectorXd::Ones(ds.eig.size());
    if (std::isinf(rho)) return Eigen::VectorXd::Zero(ds.eig.size());
    return (ds.eig.array() / (ds.eig.array() + rho)).matrix();
}

Eigen::VectorXd gd_filter(const DesignSpectrum& ds, double eta, double t) {
    if (!(eta > 0.0)) throw ValidationError("GD stepsize must be positive");
    if (!(t >= 0.0)) throw ValidationError("GD stopping time must be nonnegative");
    Eigen::VectorXd f(ds.eig.size());
    for (Eigen::Index j = 0; j < f.size(); ++j) {
        const double x = eta * ds.eig[j] / static_cast<double>(ds.n);
        if (t == 0.0)
            f[j] = 0.0;
        else if (std::isinf(t) || x >= 1.0)
            f[j] = 1.0;
        else
            f[j] = -std::expm1(t * std::log1p(-x));
    }
    return f;
}

BiasVariance filtered_risk(const DesignSpectrum& ds, const SignalCoords& sc, double sigma2, const Eigen::VectorXd& f) {
    const Eigen::VectorXd fa = f.cwiseProduct(sc.a);
    BiasVariance out;
    const double cross = fa.dot(sc.b);
    const double quad = fa.dot(ds.cov * fa);
    out.bias = std::max(0.0, sc.energy - 2.0 * cross + quad);
    if (sigma2 > 0.0)
        out.variance = sigma2 * (f.array().square() / ds.eig.array() * ds.cov.diagonal().array()).sum();
    return out;
}

double gd_level(std::size_t n, double eta, double t) {
    if (t == 0.0) return std::numeric_limits<double>::infinity();
    if (std::isinf(t)) return 0.0;
    return static_cast<double>(n) / (eta * t);
}

}  // namespace implreg
