#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "mcnet/errors.hpp"

namespace mcnet::qnum {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using QubitId = int;
using IdList = std::vector<QubitId>;

// Frobenius tolerance for matrix/state equality.
inline constexpr double kMatTol = 1e-9;
// Probability threshold below which measurement branches are pruned.
inline constexpr double kPruneTol = 1e-12;

/// Dense state over an ordered list of globally named qubits. The first id in
/// the list is the most significant bit of the basis index. Pure states are
/// amplitude vectors and may be sub-normalized (measurement branches before
/// probability extraction); mixed states are density matrices.
class QRegisterState {
public:
  enum class Form { Pure, Mixed };

  /// Defaults to the vacuum state (zero qubits, amplitude [1]).
  QRegisterState();

  static QRegisterState pure(IdList ids, Vector amplitudes);
  static QRegisterState mixed(IdList ids, Matrix density);

  /// The empty register: zero qubits, amplitude vector [1].
  static QRegisterState vacuum();
  /// |+> on a single qubit.
  static QRegisterState plus(QubitId id);
  /// Computational basis state |m> over `ids`.
  static QRegisterState basis(IdList ids, std::size_t m);

  Form form() const { return form_; }
  bool is_pure() const { return form_ == Form::Pure; }
  const IdList& ids() const { return ids_; }
  std::size_t num_qubits() const { return ids_.size(); }
  Eigen::Index dim() const { return Eigen::Index(1) << ids_.size(); }
  bool has_id(QubitId q) const;

  /// Pure-form amplitudes; only valid when is_pure().
  const Vector& amplitudes() const;
  /// Density matrix; converts on the fly for pure states.
  Matrix density() const;

  /// Squared norm (pure) or trace (mixed); the branch weight.
  double weight() const;
  /// Same state scaled to weight 1. Weight below kPruneTol throws Error.
  QRegisterState normalized() const;
  QRegisterState to_mixed() const;

  /// Same state with qubits listed in `order` (a permutation of ids()).
  QRegisterState reordered(const IdList& order) const;

private:
  QRegisterState(Form form, IdList ids, Vector amp, Matrix dens);

  Form form_;
  IdList ids_;
  Vector amp_;    // pure form
  Matrix dens_;   // mixed form
};

/// A linear map H_in -> H_out between named qubit registers. The matrix has
/// shape 2^|out| x 2^|in|; in/out id lists are independent (measurement
/// projectors drop ids, preparation isometries add them).
struct LinOp {
  IdList in_ids;
  IdList out_ids;
  Matrix matrix;

  static LinOp identity(IdList ids);
  LinOp adjoint() const;
};

/// Kraus elements sharing the same in/out registers. Trace-preserving sets
/// satisfy sum L^dag L = I; restricted (trace-decreasing) sets only <= I.
struct KrausSet {
  std::vector<LinOp> elements;

  const IdList& in_ids() const;
  const IdList& out_ids() const;
  /// ||sum L^dag L - I||_F; zero for a trace-preserving set.
  double completeness_defect() const;
};

/// Index permutation between two orderings of the same id set:
/// result[i_to] = i_from.
std::vector<Eigen::Index> basis_permutation(const IdList& from, const IdList& to);

/// Joint state on disjoint registers, ids concatenated.
QRegisterState tensor(const QRegisterState& a, const QRegisterState& b);

/// Applies `op` on its target ids, identity elsewhere. out_ids replace in_ids
/// in the register; fresh out ids are adjoined, measured ids disappear.
QRegisterState embed_apply(const LinOp& op, const QRegisterState& state);

/// op tensored with identity over `reg` (op.in_ids must be contained in reg).
/// Resulting in_ids are a permutation of reg: op.in_ids then the rest.
LinOp embed(const LinOp& op, const IdList& reg);

/// Row-permutes `op` so its out_ids equal `order`.
LinOp reorder_out(const LinOp& op, const IdList& order);
/// Column-permutes `op` so its in_ids equal `order`.
LinOp reorder_in(const LinOp& op, const IdList& order);

/// second . first, where second acts on first's output register (embedding
/// with identity on untouched ids). Returns the composite from first.in_ids.
LinOp compose_on_register(const LinOp& second, const LinOp& first);

/// Mixed-form state on `keep`, remaining qubits traced out.
QRegisterState partial_trace(const QRegisterState& state, const IdList& keep);

/// Unnormalized Choi matrix sum_{m,n} |m><n| (x) L(|m><n|) of the channel.
Matrix choi(const KrausSet& k);

/// Frobenius distance ||a - b||_F.
double frob_dist(const Matrix& a, const Matrix& b);

/// Spectral decomposition of a (Hermitian) state into weighted pure
/// components; weights below kPruneTol are dropped.
std::vector<std::pair<double, QRegisterState>> spectral(const QRegisterState& state);

// Fixed single/two-qubit gate matrices.
Matrix pauli_x();
Matrix pauli_z();
Matrix hadamard();
Matrix controlled_z();

}  // namespace mcnet::qnum
