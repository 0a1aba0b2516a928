#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "vblap/graph.hpp"
#include "vblap/types.hpp"

namespace vblap {

// Hermitian vector bundle over a vertex set: one finite-dimensional complex
// fiber per vertex, each carrying the standard Hermitian product. General
// Hermitian structures are realized up to isometry by an orthonormal choice
// of fiber bases, so no Gram matrices are carried around.
class Bundle {
 public:
  explicit Bundle(std::vector<int> dims);
  static Bundle constant(int vertex_count, int dim);

  int size() const { return static_cast<int>(dims_.size()); }
  int dim(int x) const { return dims_.at(x); }
  int offset(int x) const { return offsets_.at(x); }  // into stacked coordinates
  int total_dim() const { return total_; }
  bool constant_dim() const;

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int total_ = 0;
};

// A section assigns a fiber vector to each vertex.
using Section = std::vector<Vector>;

Section zero_section(const Bundle& bundle);
void check_section(const Bundle& bundle, const Section& u);
Vector stack(const Bundle& bundle, const Section& u);
Section unstack(const Bundle& bundle, const Vector& stacked);

// Vertexwise fiber norms |u(x)|.
RealVector fiber_norms(const Bundle& bundle, const Section& u);

// Antisymmetric edge phases for U(1) connections: theta(x,y) = -theta(y,x),
// stored once per undirected edge.
class EdgePhases {
 public:
  // Declares theta(u, v) = value (and the reverse by antisymmetry).
  // Re-declaring a pair with an inconsistent value is an error.
  void set(int u, int v, double value);
  double theta(int u, int v) const;  // 0 when never declared

 private:
  std::unordered_map<std::uint64_t, double> canonical_;
};

// Unitary connection: one unitary fiber isomorphism per undirected edge,
// stored for the canonical direction u < v; the reverse map is the
// conjugate transpose, so unitarity in one direction is validated and the
// inverse relation holds structurally.
class Connection {
 public:
  static Connection identity(const WeightedGraph& g, const Bundle& bundle);
  // Phi_{x,y} = e^{i theta(y,x)} on scalar fibers.
  static Connection magnetic(const WeightedGraph& g, const Bundle& bundle,
                             const EdgePhases& theta);
  static Connection random_unitary(const WeightedGraph& g, const Bundle& bundle,
                                   std::uint64_t seed);
  // Per-edge maps keyed by canonical direction u < v: F_u -> F_v. Unitarity
  // is rejected beyond tolerance unless validate = false (test hook for
  // deliberately corrupt instances).
  static Connection explicit_maps(const WeightedGraph& g, const Bundle& bundle,
                                  const std::vector<std::pair<std::pair<int, int>, Matrix>>& maps,
                                  bool validate = true);

  // Phi_{from,to}: fiber at `from` mapped into the fiber at `to`.
  Matrix map(int from, int to) const;
  const Matrix& stored(int u, int v) const;  // requires u < v

  std::vector<std::pair<int, int>> edges() const;  // canonical, sorted
  std::uint64_t content_hash() const;

  static constexpr double kUnitTol = 1e-12;

 private:
  Matrix& slot(int u, int v);
  std::unordered_map<std::uint64_t, Matrix> forward_;
};

// Per-vertex linear operators W(x) on the fibers. An empty container is the
// zero potential.
using Potential = std::vector<Matrix>;

Potential zero_potential(const Bundle& bundle);
bool is_zero_potential(const Potential& w);
void check_potential(const Bundle& bundle, const Potential& w);
Potential adjoint_potential(const Potential& w);
std::uint64_t potential_hash(const Potential& w);

// Per-vertex unitary frames used for gauge transformations.
using Gauge = std::vector<Matrix>;

// Phi'_{x,y} = G(y) Phi_{x,y} G(x)^*; spectra are unchanged.
Connection gauge_transform(const WeightedGraph& g, const Bundle& bundle,
                           const Connection& conn, const Gauge& frames);
Potential gauge_transform(const Potential& w, const Gauge& frames);
Section gauge_apply(const Bundle& bundle, const Gauge& frames, const Section& u);

// Weighted p-norm of a section, p in [1, inf]; pass kInf for the sup norm.
double lp_norm(const Bundle& bundle, const Section& u, const std::vector<double>& m,
               double p);
double lp_norm(const Bundle& bundle, const Section& u, const WeightedGraph& g, double p);

// (u, v) = sum_x m(x) <u(x), v(x)>, linear in u, conjugate-linear in v.
cplx inner_product(const Bundle& bundle, const Section& u, const Section& v,
                   const std::vector<double>& m);
cplx inner_product(const Bundle& bundle, const Section& u, const Section& v,
                   const WeightedGraph& g);

}  // namespace vblap
