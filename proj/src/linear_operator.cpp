#include "pdslide/linear_operator.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "pdslide/rng.hpp"

namespace pdslide {

Eigen::MatrixXd LinearOperator::to_dense() const {
  Eigen::MatrixXd out(rows(), cols());
  Vec e = Vec::Zero(cols());
  Vec col;
  for (Eigen::Index j = 0; j < cols(); ++j) {
    e[j] = 1.0;
    apply(e, col);
    out.col(j) = col;
    e[j] = 0.0;
  }
  return out;
}

double operator_norm(const LinearOperator& op, double tol) {
  if (!(tol > 0.0)) throw ConfigError("operator_norm: tol must be positive");
  const Eigen::Index n = op.cols();
  if (n == 0 || op.rows() == 0) return 0.0;
  const std::int64_t cap = 10 * static_cast<std::int64_t>(n);

  KeyedStream rng(hash_key(0x5eed, static_cast<std::uint64_t>(n)));
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  v.normalize();

  // Lanczos on A^T A: the columns of basis span the power-iteration Krylov
  // space {v, A^T A v, ...}, kept orthonormal by full reorthogonalization.
  // The largest Ritz value never decreases and never exceeds ||A||^2.
  std::vector<Vec> basis{v};
  std::vector<double> diag, offdiag;
  Vec av, w;
  double estimate = 0.0;
  for (std::int64_t iter = 0; iter < cap; ++iter) {
    op.apply(basis.back(), av);
    op.apply_adjoint(av, w);
    diag.push_back(basis.back().dot(w));
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : basis) w -= q.dot(w) * q;

    const auto j = static_cast<Eigen::Index>(diag.size());
    double next = diag[0];
    if (j > 1) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      Vec sub = Eigen::Map<const Vec>(offdiag.data(), j - 1);
      es.computeFromTridiagonal(Eigen::Map<const Vec>(diag.data(), j), sub, Eigen::EigenvaluesOnly);
      next = es.eigenvalues().maxCoeff();
    }
    const double beta = w.norm();
    // Exhausted Krylov space: the Ritz values are exact.
    const bool invariant = beta <= 1e-14 * std::max(std::abs(next), 1e-300) || j == n;
    if (invariant || (iter > 0 && std::abs(next - estimate) <= tol * std::abs(next)))
      return std::sqrt(std::max(next, 0.0));
    estimate = next;
    offdiag.push_back(beta);
    basis.push_back(w / beta);
  }
  std::ostringstream msg;
  msg << "operator_norm: power iteration did not converge in " << cap << " iterations (last estimate "
      << std::sqrt(std::max(estimate, 0.0)) << ")";
  throw NormNotConverged(msg.str(), std::sqrt(std::max(estimate, 0.0)));
}

ConsensusOperator::ConsensusOperator(Form form, std::shared_ptr<const CommGraph> g, int d,
                                     std::vector<std::int8_t> sign)
    : form_(form), graph_(std::move(g)), d_(d), sign_(std::move(sign)) {
  if (!graph_) throw ConfigError("consensus operator: null graph");
  if (d_ < 1) throw ConfigError("consensus operator: block dimension must be positive");
  norm_ = operator_norm(*this);
}

ConsensusOperator ConsensusOperator::laplacian(std::shared_ptr<const CommGraph> g, int d) {
  return ConsensusOperator(Form::laplacian, std::move(g), d, {});
}

ConsensusOperator ConsensusOperator::incidence(std::shared_ptr<const CommGraph> g, int d,
                                               std::uint64_t orientation_seed) {
  if (!g) throw ConfigError("consensus operator: null graph");
  std::vector<std::int8_t> sign(g->edge_count(), 1);
  if (orientation_seed != 0) {
    KeyedStream rng(hash_key(orientation_seed, 0x0e1e));
    for (auto& s : sign) s = (rng() & 1U) ? 1 : -1;
  }
  return ConsensusOperator(Form::incidence, std::move(g), d, std::move(sign));
}

Eigen::Index ConsensusOperator::rows() const {
  const auto blocks = form_ == Form::laplacian ? static_cast<Eigen::Index>(graph_->node_count())
                                               : static_cast<Eigen::Index>(graph_->edge_count());
  return blocks * d_;
}

Eigen::Index ConsensusOperator::cols() const { return static_cast<Eigen::Index>(graph_->node_count()) * d_; }

void ConsensusOperator::apply(const Vec& x, Vec& out) const {
  if (x.size() != cols()) throw ConfigError("consensus operator: input dimension mismatch");
  out.resize(rows());
  std::span<const double> in(x.data(), static_cast<std::size_t>(x.size()));
  std::span<double> o(out.data(), static_cast<std::size_t>(out.size()));
  const bool omp = exec_ == kernels::Exec::omp;
  if (form_ == Form::laplacian) {
    omp ? kernels::laplacian_apply_omp(*graph_, d_, in, o) : kernels::laplacian_apply_serial(*graph_, d_, in, o);
  } else {
    omp ? kernels::incidence_apply_omp(*graph_, sign_, d_, in, o)
        : kernels::incidence_apply_serial(*graph_, sign_, d_, in, o);
  }
}

void ConsensusOperator::apply_adjoint(const Vec& z, Vec& out) const {
  if (form_ == Form::laplacian) {
    apply(z, out);  // symmetric
    return;
  }
  if (z.size() != rows()) throw ConfigError("consensus operator: adjoint input dimension mismatch");
  out.resize(cols());
  std::span<const double> in(z.data(), static_cast<std::size_t>(z.size()));
  std::span<double> o(out.data(), static_cast<std::size_t>(out.size()));
  exec_ == kernels::Exec::omp ? kernels::incidence_adjoint_omp(*graph_, sign_, d_, in, o)
                              : kernels::incidence_adjoint_serial(*graph_, sign_, d_, in, o);
}

std::string_view to_string(ConsensusOperator::Form form) {
  return form == ConsensusOperator::Form::laplacian ? "laplacian" : "incidence";
}

ConsensusOperator::Form parse_operator_form(std::string_view name) {
  if (name == "laplacian") return ConsensusOperator::Form::laplacian;
  if (name == "incidence") return ConsensusOperator::Form::incidence;
  throw ConfigError("unknown operator form '" + std::string(name) + "'");
}

DenseOperator::DenseOperator(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (!matrix_.allFinite()) throw ConfigError("dense operator: non-finite entries");
  norm_ = operator_norm(*this);
}

void DenseOperator::apply(const Vec& x, Vec& out) const {
  if (x.size() != cols()) throw ConfigError("dense operator: input dimension mismatch");
  out.noalias() = matrix_ * x;
}

void DenseOperator::apply_adjoint(const Vec& z, Vec& out) const {
  if (z.size() != rows()) throw ConfigError("dense operator: adjoint input dimension mismatch");
  out.noalias() = matrix_.transpose() * z;
}

}  // namespace pdslide
