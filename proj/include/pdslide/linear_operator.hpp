#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "pdslide/error.hpp"
#include "pdslide/graph.hpp"
#include "pdslide/kernels.hpp"

namespace pdslide {

using Vec = Eigen::VectorXd;

/// A linear map with its adjoint and a cached spectral norm.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;

  /// out = A x; out is resized as needed.
  virtual void apply(const Vec& x, Vec& out) const = 0;
  /// out = A^T z.
  virtual void apply_adjoint(const Vec& z, Vec& out) const = 0;

  /// Cached ||A||_2.
  virtual double norm() const = 0;

  Vec apply(const Vec& x) const {
    Vec out;
    apply(x, out);
    return out;
  }
  Vec apply_adjoint(const Vec& z) const {
    Vec out;
    apply_adjoint(z, out);
    return out;
  }

  /// Dense materialization, column by column. For oracles and small problems.
  virtual Eigen::MatrixXd to_dense() const;
};

/// Raised when power iteration hits its cap; carries the last estimate.
class NormNotConverged : public SolverError {
 public:
  NormNotConverged(const std::string& what, double last_estimate)
      : SolverError(what), last_estimate_(last_estimate) {}
  double last_estimate() const { return last_estimate_; }

 private:
  double last_estimate_;
};

/// ||A||_2 from power iteration on A^T A with Rayleigh-Ritz extraction over
/// the iterates (Lanczos, fully reorthogonalized). Stops when the top Ritz
/// value changes by less than `tol` (relative) or the Krylov space is
/// exhausted. Caps at 10 * cols iterations.
double operator_norm(const LinearOperator& op, double tol = 1e-12);

/// Consensus constraint operator induced by a communication graph: either
/// L (x) I_d or B^T (x) I_d. Matrix-free, immutable, shareable.
class ConsensusOperator final : public LinearOperator {
 public:
  enum class Form { laplacian, incidence };

  static ConsensusOperator laplacian(std::shared_ptr<const CommGraph> g, int d);
  /// orientation_seed == 0 keeps the default orientation (lower index is +);
  /// any other seed flips each edge by a seeded coin.
  static ConsensusOperator incidence(std::shared_ptr<const CommGraph> g, int d, std::uint64_t orientation_seed = 0);

  Form form() const { return form_; }
  const CommGraph& graph() const { return *graph_; }
  std::shared_ptr<const CommGraph> graph_ptr() const { return graph_; }
  int block_dim() const { return d_; }
  int agents() const { return graph_->node_count(); }
  const std::vector<std::int8_t>& orientation() const { return sign_; }

  Eigen::Index rows() const override;
  Eigen::Index cols() const override;
  void apply(const Vec& x, Vec& out) const override;
  void apply_adjoint(const Vec& z, Vec& out) const override;
  double norm() const override { return norm_; }
  using LinearOperator::apply;
  using LinearOperator::apply_adjoint;

  void set_exec(kernels::Exec exec) { exec_ = exec; }
  kernels::Exec exec() const { return exec_; }

 private:
  ConsensusOperator(Form form, std::shared_ptr<const CommGraph> g, int d, std::vector<std::int8_t> sign);

  Form form_;
  std::shared_ptr<const CommGraph> graph_;
  int d_;
  std::vector<std::int8_t> sign_;
  double norm_ = 0.0;
  kernels::Exec exec_ = kernels::Exec::serial;
};

std::string_view to_string(ConsensusOperator::Form form);
ConsensusOperator::Form parse_operator_form(std::string_view name);

/// Explicit matrix operator, for general saddle and constrained problems.
class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Eigen::MatrixXd matrix);

  Eigen::Index rows() const override { return matrix_.rows(); }
  Eigen::Index cols() const override { return matrix_.cols(); }
  void apply(const Vec& x, Vec& out) const override;
  void apply_adjoint(const Vec& z, Vec& out) const override;
  double norm() const override { return norm_; }
  Eigen::MatrixXd to_dense() const override { return matrix_; }
  using LinearOperator::apply;
  using LinearOperator::apply_adjoint;

  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  Eigen::MatrixXd matrix_;
  double norm_ = 0.0;
};

}  // namespace pdslide
