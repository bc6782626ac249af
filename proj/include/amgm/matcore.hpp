#pragma once

#include <cstddef>
#include <vector>

#include "amgm/matrix.hpp"

namespace amgm {

class MatrixFamily;

struct EigenResult {
  std::vector<double> eigenvalues;  ///< ascending
  DenseMatrix eigenvectors;         ///< column j pairs with eigenvalues[j]
};

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kDefaultPsdTolerance = 1e-10;
inline constexpr std::size_t kDefaultRadiusGrid = 2048;

/// Cyclic Jacobi. Sweeps until the off-diagonal Frobenius mass drops to
/// 1e-14 * ||m||_F; gives up with NoConvergence after 100 sweeps.
EigenResult sym_eigen(const DenseMatrix& m);

/// Largest singular value, via the Gram matrix. Rectangular inputs use the
/// smaller Gram; square inputs take the max over both Grams so that
/// spectral_norm(m) == spectral_norm(m.transpose()) bit for bit.
double spectral_norm(const DenseMatrix& m);

double min_eigenvalue(const DenseMatrix& m);
double max_eigenvalue(const DenseMatrix& m);

/// min eigenvalue >= -tol * max(1, ||m||).
bool is_psd(const DenseMatrix& m, double tol = kDefaultPsdTolerance);

/// Sum over ordered pairs i != j of (M_i M_j - M_j M_i)^2.
DenseMatrix commutator_square_sum(const MatrixFamily& family);

/// Numerical radius w(m) = sup_theta ||cos(t) Sym(m) + i sin(t) Skew(m)||.
/// Evaluated on a uniform grid over [0, pi/2] (the norm is even and
/// pi-periodic in theta for real m), then refined by golden-section search
/// around the best grid point to a bracket of width 1e-10.
double numerical_radius(const DenseMatrix& m, std::size_t grid = kDefaultRadiusGrid);

/// Spectral norm of the Hermitian matrix cos(t) Sym(m) + i sin(t) Skew(m),
/// via the real 2d x 2d symmetric embedding [[Re, -Im], [Im, Re]].
double hermitian_slice_norm(const DenseMatrix& m, double theta);

}  // namespace amgm
