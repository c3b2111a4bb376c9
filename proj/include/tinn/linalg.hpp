#pragma once

#include "tinn/common.hpp"

namespace tinn::linalg {

// J^T J with the upper triangle computed and mirrored, so the result is
// symmetric bit-exactly.
Matrix gram(const Matrix& J);

struct SpdSolution {
    Vector x;
    double jitter = 0.0;  // diagonal shift that made the factorization succeed
};

// Solves (A + jI) x = rhs by Cholesky. j starts at 0; on breakdown it is set
// to jitter0 and escalated by 10x, at most 8 times.
SpdSolution solve_spd(const Matrix& A, const Vector& rhs, double jitter0 = 1e-12);

// delta solving (J^T J + mu I) delta = J^T L.
Vector lm_update(const Matrix& J, const Vector& L, double mu);

}  // namespace tinn::linalg
