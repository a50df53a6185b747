#pragma once

#include <vector>

#include "plsreg/dataprep.hpp"
#include "plsreg/dof_profile.hpp"
#include "plsreg/pls.hpp"
#include "plsreg/types.hpp"

namespace plsreg {

// Moment representation of an m-component fit in the row-space kernel
// K = X X^T: the fitted values lie in the Krylov space spanned by
// K y, ..., K^m y, and B_ij = t_i . K^j y changes basis between the latent
// components and those powers.
struct KrylovBasis {
  int m = 0;
  Matrix B;                        // m x m moment matrix
  Vector c;                        // B^{-1} T^T y; fitted values = sum_j c_j K^j y
  Matrix V;                        // n x m dual basis T B^{-T}
  std::vector<Vector> K_powers_y;  // K^j y for j = 1..m
  Vector trace_K_powers;           // trace(K^j) for j = 1..m
  double condition = 1.0;          // condition number of B after column scaling
  Matrix K;                        // kernel the basis was built from
};

// trace(K^j) for j = 1..m via one symmetric eigendecomposition.
Vector kernel_power_traces(const Matrix& K, int m);

// Build the basis for the leading m components.  The solve for c equilibrates
// the columns of B (their scales grow geometrically with the powers of K) and
// monitors the resulting condition number; past 1e12 the basis is declared
// singular.  All internal arithmetic runs in extended precision — the basis
// is legitimately ill conditioned well before the gate — and the stored
// B, c, V are rounded copies for inspection.
KrylovBasis krylov_basis(const PlsModel& model, const Matrix& K, const Vector& y, int m);

// Model complexity without ever forming the n x n Jacobian:
//   dof = 1 + m + sum_j c_j trace(K^j)
//           - sum_{j,l} c_j t_l . K^j t_l
//           + sum_j (y - yhat) . K^j v_j
// where y is the centered response and v_j the dual basis columns.
double dof_krylov(const KrylovBasis& basis, const PlsModel& model, const Vector& y);

// The full influence matrix of the fitted map (intercept included); its trace
// equals dof_krylov.  Quadratic memory; intended for verification.
Matrix jacobian_krylov(const KrylovBasis& basis, const PlsModel& model, const Vector& y);

// Complexity profile for m = 0 .. min(m_max, components fitted), truncating at
// a singular basis or a negative estimate.
DofProfile dof_profile_krylov(const StandardizedData& data, const PlsModel& model, int m_max);

}  // namespace plsreg
