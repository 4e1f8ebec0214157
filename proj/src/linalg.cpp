#include "implreg/linalg.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#ifdef IMPLREG_HAVE_LAPACK
extern "C" void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda, double* w,
                        double* work, const int* lwork, int* iwork, const int* liwork, int* info);
#else
#include <Eigen/Eigenvalues>
#endif

namespace implreg {

SymmetricEigen symmetric_eigen(Eigen::MatrixXd a) {
    const Eigen::Index n = a.rows();
    SymmetricEigen out;
    if (n == 0) return out;
#ifdef IMPLREG_HAVE_LAPACK
    // column-major lower triangle is LAPACK's 'L'
    const int nn = static_cast<int>(n);
    Eigen::VectorXd w(n);
    int info = 0, lwork = -1, liwork = -1, iwork_query = 0;
    double work_query = 0.0;
    dsyevd_("V", "L", &nn, a.data(), &nn, w.data(), &work_query, &lwork, &iwork_query, &liwork, &info);
    if (info != 0) throw std::runtime_error("dsyevd workspace query failed: info=" + std::to_string(info));
    lwork = static_cast<int>(work_query);
    liwork = iwork_query;
    std::vector<double> work(static_cast<std::size_t>(lwork));
    std::vector<int> iwork(static_cast<std::size_t>(liwork));
    dsyevd_("V", "L", &nn, a.data(), &nn, w.data(), work.data(), &lwork, iwork.data(), &liwork, &info);
    if (info != 0) throw std::runtime_error("dsyevd failed: info=" + std::to_string(info));
    out.values = w.reverse();
    out.vectors = a.rowwise().reverse();
#else
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw std::runtime_error("symmetric eigendecomposition failed");
    out.values = es.eigenvalues().reverse();
    out.vectors = es.eigenvectors().rowwise().reverse();
#endif
    return out;
}

}  // namespace implreg
