#include "vblap/operator.hpp"

#include <algorithm>
#include <ostream>

#include <Eigen/Eigenvalues>

namespace vblap {

Vector scalar_laplacian_apply(const WeightedGraph& g, const Vector& u) {
  if (u.size() != g.size()) throw argument_error("function length does not match graph");
  Vector out(g.size());
  for (int x = 0; x < g.size(); ++x) {
    cplx acc = 0.0;
    for (const auto& e : g.neighbors(x)) acc += e.weight * (u[x] - u[e.to]);
    out[x] = acc / g.measure(x);
  }
  return out;
}

Section bundle_laplacian_apply(const WeightedGraph& g, const Bundle& bundle,
                               const Connection& conn, const Section& u) {
  check_section(bundle, u);
  Section out(bundle.size());
  for (int x = 0; x < g.size(); ++x) {
    Vector acc = Vector::Zero(bundle.dim(x));
    for (const auto& e : g.neighbors(x))
      acc += e.weight * (u[x] - conn.map(e.to, x) * u[e.to]);
    out[x] = acc / g.measure(x);
  }
  return out;
}

Section schrodinger_apply(const WeightedGraph& g, const Bundle& bundle,
                          const Connection& conn, const Potential& w, const Section& u) {
  check_potential(bundle, w);
  Section out = bundle_laplacian_apply(g, bundle, conn, u);
  if (!w.empty())
    for (int x = 0; x < bundle.size(); ++x) out[x] += w[x] * u[x];
  return out;
}

AccretivityResult check_potential_accretive(const Potential& w) {
  AccretivityResult result;
  for (std::size_t x = 0; x < w.size(); ++x) {
    if (w[x].size() == 0) continue;
    const Matrix herm = 0.5 * (w[x] + w[x].adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    const double lambda_min = es.eigenvalues().minCoeff();
    if (result.worst_vertex < 0 || lambda_min < result.margin) {
      result.worst_vertex = static_cast<int>(x);
      result.margin = lambda_min;
    }
  }
  if (result.worst_vertex < 0) result.margin = 0.0;  // zero potential
  result.accretive = result.margin >= -1e-12;
  return result;
}

bool check_potential_selfadjoint(const Potential& w, double tol) {
  for (const auto& wx : w) {
    if (wx.size() == 0) continue;
    if ((wx - wx.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

const Matrix& BlockOperator::dense() const {
  if (!dense_)
    throw argument_error("operator exceeds the dense-assembly limit");
  return *dense_;
}

Vector BlockOperator::apply(const Vector& stacked) const {
  if (stacked.size() != total_dim())
    throw argument_error("vector length does not match operator");
  if (dense_) return *dense_ * stacked;
  return sparse_ * stacked;
}

Section BlockOperator::apply(const Section& u) const {
  return unstack(bundle_, apply(stack(bundle_, u)));
}

Matrix BlockOperator::hermitian_form() const {
  return coord_m_.cast<cplx>().asDiagonal() * dense();
}

BlockOperator assemble(const WeightedGraph& g, const Bundle& bundle,
                       const Connection& conn, const Potential& w) {
  if (bundle.size() != g.size())
    throw argument_error("bundle does not match graph vertex count");
  check_potential(bundle, w);

  BlockOperator op;
  op.bundle_ = bundle;
  op.m_ = g.measures();
  const int n = g.size();
  const int total = bundle.total_dim();
  op.coord_m_.resize(total);
  for (int x = 0; x < n; ++x)
    op.coord_m_.segment(bundle.offset(x), bundle.dim(x)).setConstant(g.measure(x));

  std::vector<Eigen::Triplet<cplx>> triplets;
  for (int x = 0; x < n; ++x) {
    const int dx = bundle.dim(x);
    const int ox = bundle.offset(x);
    const double inv_m = 1.0 / g.measure(x);
    Matrix diag = (g.row_sum(x) * inv_m) * Matrix::Identity(dx, dx);
    if (!w.empty()) diag += w[x];
    for (int i = 0; i < dx; ++i)
      for (int j = 0; j < dx; ++j)
        if (diag(i, j) != 0.0) triplets.emplace_back(ox + i, ox + j, diag(i, j));
    for (const auto& e : g.neighbors(x)) {
      const Matrix block = (-e.weight * inv_m) * conn.map(e.to, x);
      const int oy = bundle.offset(e.to);
      for (int i = 0; i < block.rows(); ++i)
        for (int j = 0; j < block.cols(); ++j)
          if (block(i, j) != 0.0) triplets.emplace_back(ox + i, oy + j, block(i, j));
    }
  }
  op.sparse_.resize(total, total);
  op.sparse_.setFromTriplets(triplets.begin(), triplets.end());
  if (total <= BlockOperator::kDenseLimit) op.dense_ = Matrix(op.sparse_);

  op.scalar_fibers_ = bundle.constant_dim() && bundle.dim(0) == 1;
  op.identity_connection_ = true;
  for (auto [u, v] : conn.edges()) {
    const Matrix& phi = conn.stored(u, v);
    if (phi.rows() != phi.cols() ||
        (phi - Matrix::Identity(phi.rows(), phi.cols())).cwiseAbs().maxCoeff() > 1e-14) {
      op.identity_connection_ = false;
      break;
    }
  }
  op.zero_potential_ = is_zero_potential(w);
  op.selfadjoint_potential_ = check_potential_selfadjoint(w);
  op.graph_hash_ = g.content_hash();
  op.connection_hash_ = conn.content_hash();
  op.potential_hash_ = vblap::potential_hash(w);
  return op;
}

void write_coordinate_list(const BlockOperator& op, std::ostream& out) {
  const auto& sparse = op.sparse();
  for (int row = 0; row < sparse.rows(); ++row) {
    // the matrix is stored column-major; emit row-major for readability
    for (Eigen::Index col = 0; col < sparse.cols(); ++col) {
      const cplx value = sparse.coeff(row, col);
      if (value != 0.0)
        out << row << ' ' << col << ' ' << value.real() << ' ' << value.imag() << '\n';
    }
  }
}

PencilEigen pencil_eigensolve(const BlockOperator& op) {
  if (!op.selfadjoint_potential())
    throw argument_error("pencil eigensolve needs a self-adjoint potential");
  const RealVector& m = op.coordinate_measures();
  const RealVector inv_sqrt_m = m.cwiseSqrt().cwiseInverse();
  Matrix s = op.hermitian_form();
  s = 0.5 * (s + s.adjoint()).eval();  // symmetrize rounding noise
  const Matrix whitened =
      inv_sqrt_m.cast<cplx>().asDiagonal() * s * inv_sqrt_m.cast<cplx>().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> es(whitened);
  if (es.info() != Eigen::Success)
    throw numerical_error("pencil eigensolve failed", 0.0);
  PencilEigen out;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = inv_sqrt_m.cast<cplx>().asDiagonal() * es.eigenvectors();
  return out;
}

std::vector<cplx> eigenvalues_sorted(const BlockOperator& op) {
  Eigen::ComplexEigenSolver<Matrix> es(op.dense(), false);
  if (es.info() != Eigen::Success)
    throw numerical_error("eigensolve failed", 0.0);
  std::vector<cplx> vals(es.eigenvalues().data(),
                         es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(vals.begin(), vals.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return vals;
}

}  // namespace vblap
