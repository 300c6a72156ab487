#include "mcnet/qnum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mcnet::qnum {

namespace {

// Slack on top of the [0,1] weight window for accumulated roundoff.
constexpr double kWeightSlack = 1e-6;

void check_distinct(const IdList& ids) {
  std::set<QubitId> seen;
  for (QubitId q : ids) {
    if (!seen.insert(q).second) {
      throw OverlappingIds("duplicate qubit id " + std::to_string(q));
    }
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix identity(Eigen::Index d) { return Matrix::Identity(d, d); }

}  // namespace

QRegisterState::QRegisterState(Form form, IdList ids, Vector amp, Matrix dens)
    : form_(form), ids_(std::move(ids)), amp_(std::move(amp)), dens_(std::move(dens)) {}

QRegisterState::QRegisterState()
    : form_(Form::Pure), amp_(Vector::Ones(1)) {}

QRegisterState QRegisterState::pure(IdList ids, Vector amplitudes) {
  check_distinct(ids);
  const Eigen::Index d = Eigen::Index(1) << ids.size();
  if (amplitudes.size() != d) {
    throw ShapeMismatch("pure state on " + std::to_string(ids.size()) +
                        " qubits needs " + std::to_string(d) + " amplitudes, got " +
                        std::to_string(amplitudes.size()));
  }
  const double w = amplitudes.squaredNorm();
  if (w > 1.0 + kWeightSlack) {
    throw Error("pure state squared norm " + std::to_string(w) + " exceeds 1");
  }
  return QRegisterState(Form::Pure, std::move(ids), std::move(amplitudes), Matrix());
}

QRegisterState QRegisterState::mixed(IdList ids, Matrix density) {
  check_distinct(ids);
  const Eigen::Index d = Eigen::Index(1) << ids.size();
  if (density.rows() != d || density.cols() != d) {
    throw ShapeMismatch("density matrix shape does not match qubit count");
  }
  const double scale = std::max(1.0, density.norm());
  if ((density - density.adjoint()).norm() > kMatTol * scale) {
    throw NotHermitian("density matrix is not Hermitian");
  }
  const double tr = density.trace().real();
  if (tr < -kMatTol || tr > 1.0 + kWeightSlack) {
    throw Error("density trace " + std::to_string(tr) + " outside [0, 1]");
  }
  return QRegisterState(Form::Mixed, std::move(ids), Vector(), std::move(density));
}

QRegisterState QRegisterState::vacuum() {
  Vector one(1);
  one(0) = 1.0;
  return pure({}, std::move(one));
}

QRegisterState QRegisterState::plus(QubitId id) {
  Vector amp(2);
  amp(0) = amp(1) = 1.0 / std::sqrt(2.0);
  return pure({id}, std::move(amp));
}

QRegisterState QRegisterState::basis(IdList ids, std::size_t m) {
  const Eigen::Index d = Eigen::Index(1) << ids.size();
  Vector amp = Vector::Zero(d);
  amp(Eigen::Index(m)) = 1.0;
  return pure(std::move(ids), std::move(amp));
}

bool QRegisterState::has_id(QubitId q) const {
  return std::find(ids_.begin(), ids_.end(), q) != ids_.end();
}

const Vector& QRegisterState::amplitudes() const {
  if (form_ != Form::Pure) throw Error("amplitudes() on mixed state");
  return amp_;
}

Matrix QRegisterState::density() const {
  if (form_ == Form::Mixed) return dens_;
  return amp_ * amp_.adjoint();
}

double QRegisterState::weight() const {
  return form_ == Form::Pure ? amp_.squaredNorm() : dens_.trace().real();
}

QRegisterState QRegisterState::normalized() const {
  const double w = weight();
  if (w <= kPruneTol) throw Error("cannot normalize zero-weight state");
  if (form_ == Form::Pure) {
    return QRegisterState(Form::Pure, ids_, amp_ / std::sqrt(w), Matrix());
  }
  return QRegisterState(Form::Mixed, ids_, Vector(), dens_ / w);
}

QRegisterState QRegisterState::to_mixed() const {
  if (form_ == Form::Mixed) return *this;
  return QRegisterState(Form::Mixed, ids_, Vector(), density());
}

QRegisterState QRegisterState::reordered(const IdList& order) const {
  if (order == ids_) return *this;
  const auto perm = basis_permutation(ids_, order);
  const Eigen::Index d = dim();
  if (form_ == Form::Pure) {
    Vector amp(d);
    for (Eigen::Index i = 0; i < d; ++i) amp(i) = amp_(perm[std::size_t(i)]);
    return QRegisterState(Form::Pure, order, std::move(amp), Matrix());
  }
  Matrix dens(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      dens(i, j) = dens_(perm[std::size_t(i)], perm[std::size_t(j)]);
    }
  }
  return QRegisterState(Form::Mixed, order, Vector(), std::move(dens));
}

LinOp LinOp::identity(IdList ids) {
  const Eigen::Index d = Eigen::Index(1) << ids.size();
  return LinOp{ids, ids, qnum::identity(d)};
}

LinOp LinOp::adjoint() const { return LinOp{out_ids, in_ids, matrix.adjoint()}; }

const IdList& KrausSet::in_ids() const {
  if (elements.empty()) throw ShapeMismatch("empty Kraus set");
  return elements.front().in_ids;
}

const IdList& KrausSet::out_ids() const {
  if (elements.empty()) throw ShapeMismatch("empty Kraus set");
  return elements.front().out_ids;
}

double KrausSet::completeness_defect() const {
  const Eigen::Index d = Eigen::Index(1) << in_ids().size();
  Matrix sum = Matrix::Zero(d, d);
  for (const LinOp& k : elements) sum += k.matrix.adjoint() * k.matrix;
  return (sum - qnum::identity(d)).norm();
}

std::vector<Eigen::Index> basis_permutation(const IdList& from, const IdList& to) {
  const std::size_t n = from.size();
  if (to.size() != n) throw ShapeMismatch("basis_permutation on different id counts");
  std::unordered_map<QubitId, std::size_t> pos_from;
  for (std::size_t k = 0; k < n; ++k) pos_from[from[k]] = k;
  std::vector<std::size_t> shift_from(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto it = pos_from.find(to[k]);
    if (it == pos_from.end()) {
      throw UnknownQubit("qubit " + std::to_string(to[k]) + " not in register");
    }
    shift_from[k] = n - 1 - it->second;
  }
  const Eigen::Index d = Eigen::Index(1) << n;
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::Index src = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if ((i >> (n - 1 - k)) & 1) src |= Eigen::Index(1) << shift_from[k];
    }
    perm[std::size_t(i)] = src;
  }
  return perm;
}

QRegisterState tensor(const QRegisterState& a, const QRegisterState& b) {
  for (QubitId q : b.ids()) {
    if (a.has_id(q)) {
      throw OverlappingIds("tensor operands share qubit " + std::to_string(q));
    }
  }
  IdList ids = a.ids();
  ids.insert(ids.end(), b.ids().begin(), b.ids().end());
  if (a.is_pure() && b.is_pure()) {
    const Vector& va = a.amplitudes();
    const Vector& vb = b.amplitudes();
    Vector amp(va.size() * vb.size());
    for (Eigen::Index i = 0; i < va.size(); ++i) {
      amp.segment(i * vb.size(), vb.size()) = va(i) * vb;
    }
    return QRegisterState::pure(std::move(ids), std::move(amp));
  }
  return QRegisterState::mixed(std::move(ids), kron(a.density(), b.density()));
}

LinOp embed(const LinOp& op, const IdList& reg) {
  IdList rest;
  for (QubitId q : reg) {
    if (std::find(op.in_ids.begin(), op.in_ids.end(), q) == op.in_ids.end()) {
      rest.push_back(q);
    }
  }
  if (rest.size() + op.in_ids.size() != reg.size()) {
    // some op input is missing from the register
    for (QubitId q : op.in_ids) {
      if (std::find(reg.begin(), reg.end(), q) == reg.end()) {
        throw UnknownQubit("operator input qubit " + std::to_string(q) +
                           " not in register");
      }
    }
  }
  IdList in = op.in_ids;
  in.insert(in.end(), rest.begin(), rest.end());
  IdList out = op.out_ids;
  out.insert(out.end(), rest.begin(), rest.end());
  const Eigen::Index dr = Eigen::Index(1) << rest.size();
  return LinOp{std::move(in), std::move(out), kron(op.matrix, identity(dr))};
}

LinOp reorder_out(const LinOp& op, const IdList& order) {
  if (order == op.out_ids) return op;
  const auto perm = basis_permutation(op.out_ids, order);
  Matrix m(op.matrix.rows(), op.matrix.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) = op.matrix.row(perm[std::size_t(i)]);
  return LinOp{op.in_ids, order, std::move(m)};
}

LinOp reorder_in(const LinOp& op, const IdList& order) {
  if (order == op.in_ids) return op;
  const auto perm = basis_permutation(op.in_ids, order);
  Matrix m(op.matrix.rows(), op.matrix.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) = op.matrix.col(perm[std::size_t(j)]);
  return LinOp{order, op.out_ids, std::move(m)};
}

LinOp compose_on_register(const LinOp& second, const LinOp& first) {
  LinOp emb = embed(second, first.out_ids);
  LinOp aligned = reorder_out(first, emb.in_ids);
  return LinOp{first.in_ids, emb.out_ids, emb.matrix * aligned.matrix};
}

QRegisterState embed_apply(const LinOp& op, const QRegisterState& state) {
  for (QubitId q : op.in_ids) {
    if (!state.has_id(q)) {
      throw UnknownQubit("qubit " + std::to_string(q) + " not in state");
    }
  }
  for (QubitId q : op.out_ids) {
    const bool consumed =
        std::find(op.in_ids.begin(), op.in_ids.end(), q) != op.in_ids.end();
    if (!consumed && state.has_id(q)) {
      throw OverlappingIds("fresh output qubit " + std::to_string(q) +
                           " already in state");
    }
  }
  LinOp full = embed(op, state.ids());
  QRegisterState aligned = state.reordered(full.in_ids);
  if (aligned.is_pure()) {
    return QRegisterState::pure(full.out_ids, full.matrix * aligned.amplitudes());
  }
  return QRegisterState::mixed(
      full.out_ids, full.matrix * aligned.density() * full.matrix.adjoint());
}

QRegisterState partial_trace(const QRegisterState& state, const IdList& keep) {
  for (QubitId q : keep) {
    if (!state.has_id(q)) {
      throw UnknownQubit("qubit " + std::to_string(q) + " not in state");
    }
  }
  check_distinct(keep);
  IdList traced;
  for (QubitId q : state.ids()) {
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
  }
  IdList order = keep;
  order.insert(order.end(), traced.begin(), traced.end());
  const Matrix rho = state.reordered(order).density();
  const Eigen::Index dk = Eigen::Index(1) << keep.size();
  const Eigen::Index dt = Eigen::Index(1) << traced.size();
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i) {
    for (Eigen::Index j = 0; j < dk; ++j) {
      for (Eigen::Index t = 0; t < dt; ++t) out(i, j) += rho(i * dt + t, j * dt + t);
    }
  }
  return QRegisterState::mixed(keep, std::move(out));
}

Matrix choi(const KrausSet& k) {
  if (k.elements.empty()) throw ShapeMismatch("empty Kraus set");
  const LinOp& first = k.elements.front();
  for (const LinOp& e : k.elements) {
    if (e.in_ids != first.in_ids || e.out_ids != first.out_ids ||
        e.matrix.rows() != first.matrix.rows() ||
        e.matrix.cols() != first.matrix.cols()) {
      throw ShapeMismatch("Kraus elements on different registers");
    }
  }
  const Eigen::Index din = first.matrix.cols();
  const Eigen::Index dout = first.matrix.rows();
  Matrix c = Matrix::Zero(din * dout, din * dout);
  for (const LinOp& e : k.elements) {
    for (Eigen::Index m = 0; m < din; ++m) {
      for (Eigen::Index n = 0; n < din; ++n) {
        c.block(m * dout, n * dout, dout, dout) +=
            e.matrix.col(m) * e.matrix.col(n).adjoint();
      }
    }
  }
  return c;
}

double frob_dist(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch("frob_dist on different shapes");
  }
  return (a - b).norm();
}

std::vector<std::pair<double, QRegisterState>> spectral(const QRegisterState& state) {
  const Matrix rho = state.density();
  const double scale = std::max(1.0, rho.norm());
  if ((rho - rho.adjoint()).norm() > kMatTol * scale) {
    throw NotHermitian("spectral decomposition of non-Hermitian matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed");
  std::vector<std::pair<double, QRegisterState>> parts;
  for (Eigen::Index k = rho.rows() - 1; k >= 0; --k) {
    const double w = solver.eigenvalues()(k);
    if (w <= kPruneTol) continue;
    Vector v = solver.eigenvectors().col(k);
    parts.emplace_back(w, QRegisterState::pure(state.ids(), std::move(v)));
  }
  return parts;
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix hadamard() {
  Matrix m(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

Matrix controlled_z() {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = -1;
  return m;
}

}  // namespace mcnet::qnum
