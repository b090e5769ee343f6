#include "pdslide/saddle.hpp"

#include <Eigen/Dense>
#include <string>

#include "pdslide/error.hpp"

namespace pdslide {

SaddleResult saddle_run(const SaddleProblem& p, const ParamSchedule& s, std::int64_t N, const Vec& x0,
                        const Vec& y0, const Vec& z0, SlidingOptions options) {
  if (N < 1) throw ConfigError("saddle_run: N must be >= 1");
  if (!p.op || !p.dual) throw ConfigError("saddle_run: problem needs an operator and a dual term");
  if (y0.size() != x0.size()) throw ConfigError("saddle_run: y0 has the wrong dimension");
  if (s.tau(1) != 0.0) throw ConfigError("saddle_run: schedules with tau_1 != 0 need a conjugate prox for y");
  ExactGradients source(p.primal);
  options.z0 = z0;
  SlidingSolver solver(p.primal, *p.op, s, *p.dual, source, x0, std::move(options));
  solver.run(N);
  SaddleResult out;
  out.x_bar = solver.state().x_bar;
  out.y_bar = solver.state().y_bar;
  out.z_bar = solver.state().z_bar;
  out.state = solver.state();
  out.metrics = solver.metrics();
  return out;
}

namespace {

double mu_nu(const std::vector<LocalObjective>& objs, const Vec& x) {
  const int d = objs.front().dim();
  double total = 0.0;
  for (std::size_t i = 0; i < objs.size(); ++i)
    total += 0.5 * objs[i].mu() * x.segment(static_cast<Eigen::Index>(i) * d, d).squaredNorm();
  return total;
}

std::optional<double> conjugate_sum(const std::vector<LocalObjective>& objs, const Vec& y) {
  const int d = objs.front().dim();
  double total = 0.0;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const auto v = objs[i].smooth().conjugate(y.segment(static_cast<Eigen::Index>(i) * d, d));
    if (!v) return std::nullopt;
    total += *v;
  }
  return total;
}

}  // namespace

GapValue gap_estimate(const GapProbe& w, const SaddleProblem& p, std::optional<double> f_star) {
  const auto& objs = p.primal;
  const auto& A = *p.op;
  const auto& h = *p.dual;
  const auto conj_y = conjugate_sum(objs, w.y);
  const auto conj_ybar = conj_y ? conjugate_sum(objs, w.y_bar) : std::nullopt;
  if (!conj_y || !conj_ybar) {
    if (!f_star) throw ConfigError("gap_estimate: no closed-form conjugate; the surrogate needs f*");
    return {stacked_value(objs, w.x_bar) - *f_star, true};
  }
  const double lhs = mu_nu(objs, w.x_bar) + w.x_bar.dot(w.y + A.apply_adjoint(w.z)) - *conj_y - h.value(w.z);
  const double rhs =
      mu_nu(objs, w.x) + w.x.dot(w.y_bar + A.apply_adjoint(w.z_bar)) - *conj_ybar - h.value(w.z_bar);
  return {lhs - rhs, false};
}

KktSolution kkt_reference(const std::vector<LocalObjective>& f, const LinearOperator& A, const Vec& b) {
  if (f.empty()) throw ConfigError("kkt_reference: no objectives");
  const int d = f.front().dim();
  const Eigen::Index n = static_cast<Eigen::Index>(f.size()) * d;
  if (A.cols() != n || b.size() != A.rows()) throw ConfigError("kkt_reference: dimension mismatch");
  Vec h_diag(n), lin(n);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto* quad = dynamic_cast<const DiagonalQuadratic*>(&f[i].smooth());
    if (!quad || f[i].set().kind() != FeasibleSet::Kind::whole_space)
      throw ConfigError("kkt_reference: needs unconstrained diagonal quadratics");
    const Eigen::Index off = static_cast<Eigen::Index>(i) * d;
    h_diag.segment(off, d) = quad->q_diag().array() + f[i].mu();
    lin.segment(off, d) = quad->linear();
  }
  const Eigen::Index r = A.rows();
  const Eigen::MatrixXd a = A.to_dense();
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + r, n + r);
  kkt.topLeftCorner(n, n) = h_diag.asDiagonal();
  kkt.topRightCorner(n, r) = a.transpose();
  kkt.bottomLeftCorner(r, n) = a;
  Vec rhs(n + r);
  rhs << -lin, b;
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
  const Vec sol = cod.solve(rhs);
  if ((kkt * sol - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm()))
    throw SolverError("kkt_reference: constraints are inconsistent or the Hessian is singular on ker A");
  KktSolution out;
  out.x = sol.head(n);
  out.z = sol.tail(r);
  out.value = stacked_value(f, out.x);
  return out;
}

ConstrainedResult constrained_solve(const std::vector<LocalObjective>& f, std::shared_ptr<const LinearOperator> A,
                                    const Vec& b, const ParamSchedule& s, std::int64_t N, const Vec& x0,
                                    std::optional<double> f_star) {
  if (!A) throw ConfigError("constrained_solve: missing operator");
  if (b.size() != A->rows()) throw ConfigError("constrained_solve: b has the wrong dimension");
  SaddleProblem p{f, A, std::make_shared<LinearDual>(b)};
  const Vec y0 = Vec::Zero(x0.size());
  const Vec z0 = Vec::Zero(A->rows());
  const auto run = saddle_run(p, s, N, x0, y0, z0);
  ConstrainedResult out;
  out.f_star = f_star ? *f_star : kkt_reference(f, *A, b).value;
  out.x_bar = run.x_bar;
  out.f_gap = stacked_value(f, run.x_bar) - out.f_star;
  out.residual = (A->apply(run.x_bar) - b).norm();
  out.metrics = run.metrics;
  return out;
}

}  // namespace pdslide
