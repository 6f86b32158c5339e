#pragma once

#include <Eigen/Core>

namespace semtype {

// Dense symmetric matrix; construction symmetrizes to (A + A^T)/2 so
// downstream code can rely on exact symmetry.
class SymMatrix {
public:
  explicit SymMatrix(const Eigen::MatrixXd& a);
  const Eigen::MatrixXd& data() const { return data_; }
  Eigen::Index order() const { return data_.rows(); }

private:
  Eigen::MatrixXd data_;
};

// Eigenvalues sorted descending; eigenvectors are the aligned orthonormal
// columns, each with its largest-magnitude component made positive.
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
// tol * ||A||_F or the sweep budget runs out. Throws NoConvergence only when
// the budget is exhausted with the off-norm still above 1e-6 * ||A||_F.
EigenDecomposition jacobi_eigen(const SymMatrix& a, double tol = 1e-10, int max_sweeps = 100);

}  // namespace semtype
