#pragma once

#include "core/types.hpp"

namespace berknash {

// Solves A x = b by LU with partial pivoting plus iterative refinement.
// Deterministic for identical inputs. The result satisfies
// |A x - b|_2 <= 1e-10 * max(1, |b|_2) for condition numbers up to ~1e6.
// Throws SingularMatrix when a pivot magnitude falls to or below
// 1e-12 * |A|_inf during factorization, InvalidParams on bad shapes or
// non-finite input.
Vector solve_linear(const Matrix& A, const Vector& b);

// Matrix inverse through the same factorization and pivot test.
Matrix invert(const Matrix& A);

// Largest eigenvalue modulus of a square real matrix, symmetric or not,
// accurate to tol (relative). Throws NoConvergence if the eigenvalue
// iteration fails to stabilize, InvalidParams for empty input or tol <= 0.
double spectral_radius(const Matrix& A, double tol = 1e-10);

// Largest singular value, i.e. the induced 2-norm. Accurate to 1e-8
// relative; exact 0 for the zero matrix.
double operator_norm(const Matrix& A);

}  // namespace berknash
