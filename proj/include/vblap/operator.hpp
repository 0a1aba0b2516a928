#pragma once

#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "vblap/bundle.hpp"
#include "vblap/graph.hpp"

namespace vblap {

// (Delta u)(x) = (1/m(x)) sum_y b(x,y) (u(x) - u(y)) on scalar functions.
Vector scalar_laplacian_apply(const WeightedGraph& g, const Vector& u);

// (Delta u)(x) = (1/m(x)) sum_y b(x,y) (u(x) - Phi_{y,x} u(y)) on sections.
Section bundle_laplacian_apply(const WeightedGraph& g, const Bundle& bundle,
                               const Connection& conn, const Section& u);

// H u = Delta u + W u.
Section schrodinger_apply(const WeightedGraph& g, const Bundle& bundle,
                          const Connection& conn, const Potential& w, const Section& u);

struct AccretivityResult {
  bool accretive = true;
  int worst_vertex = -1;
  double margin = 0.0;  // min over x of the smallest eigenvalue of (W + W*)/2
};

// Accretive iff the Hermitian part of every W(x) is positive semidefinite
// (within a -1e-12 eigenvalue floor).
AccretivityResult check_potential_accretive(const Potential& w);

// True iff max-entry norm of W(x) - W(x)* is within 1e-12 at every vertex.
bool check_potential_selfadjoint(const Potential& w, double tol = 1e-12);

// Assembled matrix form of Delta + W acting on stacked fiber coordinates:
// A = M^{-1}(D - B) + W_blk with M the per-coordinate measure diagonal, D the
// b row-sum diagonal and B the connection-twisted adjacency. Dense storage is
// kept below kDenseLimit coordinates; the sparse form is always available,
// and both share the same apply contract.
class BlockOperator {
 public:
  static constexpr int kDenseLimit = 2000;

  int total_dim() const { return static_cast<int>(coord_m_.size()); }
  const Bundle& bundle() const { return bundle_; }
  const std::vector<double>& measures() const { return m_; }
  const RealVector& coordinate_measures() const { return coord_m_; }

  Vector apply(const Vector& stacked) const;
  Section apply(const Section& u) const;

  const Matrix& dense() const;  // throws above kDenseLimit
  const Eigen::SparseMatrix<cplx>& sparse() const { return sparse_; }
  bool has_dense() const { return dense_.has_value(); }

  // S = M A = D - B + M W_blk; Hermitian whenever W is self-adjoint.
  Matrix hermitian_form() const;

  bool scalar_fibers() const { return scalar_fibers_; }
  bool identity_connection() const { return identity_connection_; }
  bool zero_potential() const { return zero_potential_; }
  bool selfadjoint_potential() const { return selfadjoint_potential_; }

  std::uint64_t graph_hash() const { return graph_hash_; }
  std::uint64_t connection_hash() const { return connection_hash_; }
  std::uint64_t potential_hash() const { return potential_hash_; }

  friend BlockOperator assemble(const WeightedGraph& g, const Bundle& bundle,
                                const Connection& conn, const Potential& w);

 private:
  BlockOperator() = default;

  Bundle bundle_{std::vector<int>{1}};
  std::vector<double> m_;
  RealVector coord_m_;
  Eigen::SparseMatrix<cplx> sparse_;
  std::optional<Matrix> dense_;
  bool scalar_fibers_ = false;
  bool identity_connection_ = false;
  bool zero_potential_ = false;
  bool selfadjoint_potential_ = false;
  std::uint64_t graph_hash_ = 0;
  std::uint64_t connection_hash_ = 0;
  std::uint64_t potential_hash_ = 0;
};

BlockOperator assemble(const WeightedGraph& g, const Bundle& bundle,
                       const Connection& conn, const Potential& w);

// Coordinate-list export, one "row col re im" line per stored entry,
// 0-indexed, row-major order.
void write_coordinate_list(const BlockOperator& op, std::ostream& out);

struct PencilEigen {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns, m-orthonormal
};

// Eigenpairs of the Hermitian pencil (S, M); requires self-adjoint W.
PencilEigen pencil_eigensolve(const BlockOperator& op);

// General complex spectrum of A, sorted by (re, im). For gauge-invariance
// comparisons with arbitrary potentials.
std::vector<cplx> eigenvalues_sorted(const BlockOperator& op);

}  // namespace vblap
