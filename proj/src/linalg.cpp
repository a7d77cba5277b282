#include "qpr/linalg.hpp"

#include <Eigen/Dense>

namespace qpr {

namespace {

Backend g_backend =
#ifdef _OPENMP
    Backend::parallel;
#else
    Backend::serial;
#endif

Eigen::MatrixXd to_eigen(const Mat& a) {
    Eigen::MatrixXd m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    return m;
}

Eigen::MatrixXcd to_eigen(const CMat& a) {
    Eigen::MatrixXcd m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    return m;
}

Mat from_eigen(const Eigen::MatrixXd& m) {
    Mat a(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) a(i, j) = m(i, j);
    return a;
}

CMat from_eigen(const Eigen::MatrixXcd& m) {
    CMat a(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) a(i, j) = m(i, j);
    return a;
}

} // namespace

Backend kernel_backend() { return g_backend; }
void set_kernel_backend(Backend b) { g_backend = b; }

SymEig eig_sym(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
    SymEig out;
    out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    out.vectors = from_eigen(es.eigenvectors());
    return out;
}

ComplexEig eig_complex(const CMat& a) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(a));
    ComplexEig out;
    out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    out.right = from_eigen(es.eigenvectors());
    Eigen::MatrixXcd inv = es.eigenvectors().partialPivLu().inverse();
    out.right_inv = from_eigen(inv);
    return out;
}

CVec solve(const CMat& a, const CVec& b) {
    Eigen::MatrixXcd m = to_eigen(a);
    Eigen::VectorXcd rhs(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) rhs(i) = b[i];
    Eigen::VectorXcd x = m.partialPivLu().solve(rhs);
    return CVec(x.data(), x.data() + x.size());
}

double op_norm(const Mat& a) {
    if (a.empty()) return 0.0;
    Eigen::MatrixXd m = to_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m, Eigen::EigenvaluesOnly);
    double lmax = es.eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, lmax));
}

double op_norm(const CMat& a) {
    if (a.empty()) return 0.0;
    Eigen::MatrixXcd m = to_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
    double lmax = es.eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, lmax));
}

} // namespace qpr
