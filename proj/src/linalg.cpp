#include "tinn/linalg.hpp"

#include <Eigen/Cholesky>

namespace tinn::linalg {

Matrix gram(const Matrix& J) {
    if (J.rows() == 0 || J.cols() == 0) throw Error("gram: empty matrix");
    const Eigen::Index p = J.cols();
    Matrix A = Matrix::Zero(p, p);
    A.selfadjointView<Eigen::Upper>().rankUpdate(J.transpose());
    A.triangularView<Eigen::StrictlyLower>() = A.transpose();
    return A;
}

SpdSolution solve_spd(const Matrix& A, const Vector& rhs, double jitter0) {
    if (A.rows() != A.cols()) throw Error("solve_spd: matrix not square");
    if (A.rows() != rhs.size()) throw Error("solve_spd: rhs size mismatch");
    const double scale = A.cwiseAbs().maxCoeff();
    const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(scale, 1.0))
        throw Error("solve_spd: matrix not symmetric");

    double jitter = 0.0;
    for (int attempt = 0; attempt <= 8; ++attempt) {
        Matrix B = A;
        if (jitter > 0.0) B.diagonal().array() += jitter;
        Eigen::LLT<Matrix> llt(B);
        if (llt.info() == Eigen::Success) {
            return SpdSolution{llt.solve(rhs), jitter};
        }
        jitter = (jitter == 0.0) ? jitter0 : jitter * 10.0;
    }
    throw Error("solve_spd: singular system after jitter escalation");
}

Vector lm_update(const Matrix& J, const Vector& L, double mu) {
    if (mu <= 0.0) throw Error("lm_update: mu must be positive");
    if (J.rows() != L.size()) throw Error("lm_update: row count mismatch");
    Matrix A = gram(J);
    A.diagonal().array() += mu;
    Vector rhs = J.transpose() * L;
    return solve_spd(A, rhs).x;
}

}  // namespace tinn::linalg
