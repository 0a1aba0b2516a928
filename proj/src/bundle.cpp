#include "vblap/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vblap/rng.hpp"

namespace vblap {

namespace {

std::uint64_t edge_key(int u, int v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t hash_matrix(std::uint64_t h, const Matrix& a) {
  std::uint64_t dims[2] = {static_cast<std::uint64_t>(a.rows()),
                           static_cast<std::uint64_t>(a.cols())};
  h = fnv1a(h, dims, sizeof(dims));
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const cplx z = a(i, j);
      double parts[2] = {z.real(), z.imag()};
      h = fnv1a(h, parts, sizeof(parts));
    }
  return h;
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

bool is_unitary(const Matrix& phi, double tol) {
  if (phi.rows() != phi.cols()) return false;
  const Matrix gram = phi.adjoint() * phi;
  return max_abs(gram - Matrix::Identity(phi.rows(), phi.cols())) <= tol;
}

// Modified Gram-Schmidt on the columns of a seeded complex Gaussian matrix.
Matrix haar_like_unitary(int d, Rng& rng) {
  for (;;) {
    Matrix a = rng.normal_matrix(d, d);
    bool degenerate = false;
    for (int j = 0; j < d; ++j) {
      for (int i = 0; i < j; ++i) a.col(j) -= a.col(i).dot(a.col(j)) * a.col(i);
      const double norm = a.col(j).norm();
      if (norm < 1e-8) {
        degenerate = true;
        break;
      }
      a.col(j) /= norm;
    }
    if (!degenerate) return a;
  }
}

}  // namespace

Bundle::Bundle(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw argument_error("bundle needs at least one fiber");
  offsets_.reserve(dims_.size());
  for (int d : dims_) {
    if (d < 1) throw argument_error("fiber dimension must be positive");
    offsets_.push_back(total_);
    total_ += d;
  }
}

Bundle Bundle::constant(int vertex_count, int dim) {
  return Bundle(std::vector<int>(vertex_count, dim));
}

bool Bundle::constant_dim() const {
  return std::all_of(dims_.begin(), dims_.end(),
                     [&](int d) { return d == dims_.front(); });
}

Section zero_section(const Bundle& bundle) {
  Section u(bundle.size());
  for (int x = 0; x < bundle.size(); ++x) u[x] = Vector::Zero(bundle.dim(x));
  return u;
}

void check_section(const Bundle& bundle, const Section& u) {
  if (static_cast<int>(u.size()) != bundle.size())
    throw argument_error("section length does not match vertex count");
  for (int x = 0; x < bundle.size(); ++x)
    if (u[x].size() != bundle.dim(x))
      throw argument_error("section entry does not match fiber dimension");
}

Vector stack(const Bundle& bundle, const Section& u) {
  check_section(bundle, u);
  Vector out(bundle.total_dim());
  for (int x = 0; x < bundle.size(); ++x)
    out.segment(bundle.offset(x), bundle.dim(x)) = u[x];
  return out;
}

Section unstack(const Bundle& bundle, const Vector& stacked) {
  if (stacked.size() != bundle.total_dim())
    throw argument_error("stacked vector does not match bundle dimension");
  Section u(bundle.size());
  for (int x = 0; x < bundle.size(); ++x)
    u[x] = stacked.segment(bundle.offset(x), bundle.dim(x));
  return u;
}

RealVector fiber_norms(const Bundle& bundle, const Section& u) {
  check_section(bundle, u);
  RealVector out(bundle.size());
  for (int x = 0; x < bundle.size(); ++x) out[x] = u[x].norm();
  return out;
}

void EdgePhases::set(int u, int v, double value) {
  if (u == v) throw argument_error("phase on a loop");
  const bool flip = u > v;
  const double canonical = flip ? -value : value;
  const auto key = edge_key(std::min(u, v), std::max(u, v));
  auto [it, inserted] = canonical_.emplace(key, canonical);
  if (!inserted && std::abs(it->second - canonical) > 1e-15) {
    std::ostringstream os;
    os << "phase on edge (" << u << "," << v << ") breaks antisymmetry";
    throw argument_error(os.str());
  }
}

double EdgePhases::theta(int u, int v) const {
  const auto it = canonical_.find(edge_key(std::min(u, v), std::max(u, v)));
  if (it == canonical_.end()) return 0.0;
  return u < v ? it->second : -it->second;
}

Matrix& Connection::slot(int u, int v) { return forward_[edge_key(u, v)]; }

const Matrix& Connection::stored(int u, int v) const {
  const auto it = forward_.find(edge_key(u, v));
  if (it == forward_.end()) throw argument_error("no connection map on that edge");
  return it->second;
}

Matrix Connection::map(int from, int to) const {
  if (from < to) return stored(from, to);
  return stored(to, from).adjoint();
}

Connection Connection::identity(const WeightedGraph& g, const Bundle& bundle) {
  Connection conn;
  for (auto [u, v] : g.undirected_edges()) {
    if (bundle.dim(u) != bundle.dim(v))
      throw argument_error("identity connection needs equal fiber dimensions on every edge");
    conn.slot(u, v) = Matrix::Identity(bundle.dim(v), bundle.dim(u));
  }
  return conn;
}

Connection Connection::magnetic(const WeightedGraph& g, const Bundle& bundle,
                                const EdgePhases& theta) {
  Connection conn;
  for (auto [u, v] : g.undirected_edges()) {
    if (bundle.dim(u) != 1 || bundle.dim(v) != 1)
      throw argument_error("magnetic connections need one-dimensional fibers");
    // Phi_{u,v} = e^{i theta(v,u)}
    Matrix phi(1, 1);
    phi(0, 0) = std::exp(cplx(0.0, theta.theta(v, u)));
    conn.slot(u, v) = phi;
  }
  return conn;
}

Connection Connection::random_unitary(const WeightedGraph& g, const Bundle& bundle,
                                      std::uint64_t seed) {
  Connection conn;
  for (auto [u, v] : g.undirected_edges()) {
    if (bundle.dim(u) != bundle.dim(v))
      throw argument_error("random connection needs equal fiber dimensions on every edge");
    Rng rng(mix_seed(seed, edge_key(u, v)));
    conn.slot(u, v) = haar_like_unitary(bundle.dim(u), rng);
  }
  return conn;
}

Connection Connection::explicit_maps(
    const WeightedGraph& g, const Bundle& bundle,
    const std::vector<std::pair<std::pair<int, int>, Matrix>>& maps, bool validate) {
  Connection conn;
  for (const auto& [edge, matrix] : maps) {
    auto [u, v] = edge;
    if (!g.has_edge(u, v)) throw argument_error("connection map on a non-edge");
    const bool flip = u > v;
    const int a = std::min(u, v), b = std::max(u, v);
    Matrix phi = flip ? Matrix(matrix.adjoint()) : matrix;
    if (phi.rows() != bundle.dim(b) || phi.cols() != bundle.dim(a))
      throw argument_error("connection map has the wrong shape");
    if (validate && !is_unitary(phi, kUnitTol))
      throw argument_error("connection map is not unitary within tolerance");
    conn.slot(a, b) = std::move(phi);
  }
  for (auto [u, v] : g.undirected_edges())
    if (conn.forward_.find(edge_key(u, v)) == conn.forward_.end())
      throw argument_error("connection map missing for an edge");
  return conn;
}

std::vector<std::pair<int, int>> Connection::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(forward_.size());
  for (const auto& [key, phi] : forward_)
    out.emplace_back(static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu));
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t Connection::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto [u, v] : edges()) {
    std::uint64_t key = edge_key(u, v);
    h = fnv1a(h, &key, sizeof(key));
    h = hash_matrix(h, stored(u, v));
  }
  return h;
}

Potential zero_potential(const Bundle& bundle) {
  Potential w(bundle.size());
  for (int x = 0; x < bundle.size(); ++x)
    w[x] = Matrix::Zero(bundle.dim(x), bundle.dim(x));
  return w;
}

bool is_zero_potential(const Potential& w) {
  for (const auto& wx : w)
    if (wx.size() != 0 && max_abs(wx) != 0.0) return false;
  return true;
}

void check_potential(const Bundle& bundle, const Potential& w) {
  if (w.empty()) return;  // zero potential
  if (static_cast<int>(w.size()) != bundle.size())
    throw argument_error("potential length does not match vertex count");
  for (int x = 0; x < bundle.size(); ++x)
    if (w[x].rows() != bundle.dim(x) || w[x].cols() != bundle.dim(x))
      throw argument_error("potential block does not match fiber dimension");
}

Potential adjoint_potential(const Potential& w) {
  Potential out(w.size());
  for (std::size_t x = 0; x < w.size(); ++x) out[x] = w[x].adjoint();
  return out;
}

std::uint64_t potential_hash(const Potential& w) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& wx : w) h = hash_matrix(h, wx);
  return h;
}

Connection gauge_transform(const WeightedGraph& g, const Bundle& bundle,
                           const Connection& conn, const Gauge& frames) {
  if (static_cast<int>(frames.size()) != bundle.size())
    throw argument_error("gauge length does not match vertex count");
  for (int x = 0; x < bundle.size(); ++x) {
    if (frames[x].rows() != bundle.dim(x) || frames[x].cols() != bundle.dim(x))
      throw argument_error("gauge frame has the wrong shape");
    if (!is_unitary(frames[x], Connection::kUnitTol))
      throw argument_error("gauge frame is not unitary within tolerance");
  }
  std::vector<std::pair<std::pair<int, int>, Matrix>> maps;
  for (auto [u, v] : conn.edges())
    maps.push_back({{u, v}, frames[v] * conn.stored(u, v) * frames[u].adjoint()});
  return Connection::explicit_maps(g, bundle, maps, false);
}

Potential gauge_transform(const Potential& w, const Gauge& frames) {
  if (w.empty()) return w;
  Potential out(w.size());
  for (std::size_t x = 0; x < w.size(); ++x)
    out[x] = frames[x] * w[x] * frames[x].adjoint();
  return out;
}

Section gauge_apply(const Bundle& bundle, const Gauge& frames, const Section& u) {
  check_section(bundle, u);
  Section out(u.size());
  for (std::size_t x = 0; x < u.size(); ++x) out[x] = frames[x] * u[x];
  return out;
}

double lp_norm(const Bundle& bundle, const Section& u, const std::vector<double>& m,
               double p) {
  check_section(bundle, u);
  if (std::isinf(p)) {
    double sup = 0.0;
    for (const auto& ux : u) sup = std::max(sup, ux.norm());
    return sup;
  }
  if (p < 1.0) throw argument_error("lp_norm needs p >= 1");
  double sum = 0.0;
  for (int x = 0; x < bundle.size(); ++x) sum += m[x] * std::pow(u[x].norm(), p);
  return std::pow(sum, 1.0 / p);
}

double lp_norm(const Bundle& bundle, const Section& u, const WeightedGraph& g, double p) {
  return lp_norm(bundle, u, g.measures(), p);
}

cplx inner_product(const Bundle& bundle, const Section& u, const Section& v,
                   const std::vector<double>& m) {
  check_section(bundle, u);
  check_section(bundle, v);
  cplx sum = 0.0;
  // <a, b> linear in the first slot: sum_i a_i conj(b_i) = b.dot(a) in Eigen.
  for (int x = 0; x < bundle.size(); ++x) sum += m[x] * v[x].dot(u[x]);
  return sum;
}

cplx inner_product(const Bundle& bundle, const Section& u, const Section& v,
                   const WeightedGraph& g) {
  return inner_product(bundle, u, v, g.measures());
}

}  // namespace vblap
