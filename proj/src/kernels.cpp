#include "pdslide/kernels.hpp"

#include <algorithm>

namespace pdslide::kernels {

namespace {

inline void laplacian_row(const CommGraph& g, int d, int i, std::span<const double> x, std::span<double> out) {
  double* row = out.data() + static_cast<std::size_t>(i) * d;
  std::fill(row, row + d, 0.0);
  const double deg = static_cast<double>(g.degree(i));
  for (int j : g.neighborhood(i)) {
    const double* xj = x.data() + static_cast<std::size_t>(j) * d;
    if (j == i) {
      for (int c = 0; c < d; ++c) row[c] += deg * xj[c];
    } else {
      for (int c = 0; c < d; ++c) row[c] -= xj[c];
    }
  }
}

inline void incidence_row(const CommGraph& g, std::span<const std::int8_t> sign, int d, std::size_t e,
                          std::span<const double> x, std::span<double> out) {
  const Edge& edge = g.edges()[e];
  const double s = sign[e];
  const double* xu = x.data() + static_cast<std::size_t>(edge.u) * d;
  const double* xv = x.data() + static_cast<std::size_t>(edge.v) * d;
  double* row = out.data() + e * d;
  for (int c = 0; c < d; ++c) row[c] = s * (xu[c] - xv[c]);
}

}  // namespace

void laplacian_apply_serial(const CommGraph& g, int d, std::span<const double> x, std::span<double> out) {
  for (int i = 0; i < g.node_count(); ++i) laplacian_row(g, d, i, x, out);
}

void laplacian_apply_omp(const CommGraph& g, int d, std::span<const double> x, std::span<double> out) {
  const int m = g.node_count();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) laplacian_row(g, d, i, x, out);
}

void incidence_apply_serial(const CommGraph& g, std::span<const std::int8_t> sign, int d,
                            std::span<const double> x, std::span<double> out) {
  for (std::size_t e = 0; e < g.edge_count(); ++e) incidence_row(g, sign, d, e, x, out);
}

void incidence_apply_omp(const CommGraph& g, std::span<const std::int8_t> sign, int d,
                         std::span<const double> x, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(g.edge_count());
#pragma omp parallel for schedule(static)
  for (std::int64_t e = 0; e < n; ++e) incidence_row(g, sign, d, static_cast<std::size_t>(e), x, out);
}

void incidence_adjoint_serial(const CommGraph& g, std::span<const std::int8_t> sign, int d,
                              std::span<const double> z, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& edge = g.edges()[e];
    const double s = sign[e];
    const double* ze = z.data() + e * d;
    double* ou = out.data() + static_cast<std::size_t>(edge.u) * d;
    double* ov = out.data() + static_cast<std::size_t>(edge.v) * d;
    for (int c = 0; c < d; ++c) {
      ou[c] += s * ze[c];
      ov[c] -= s * ze[c];
    }
  }
}

void incidence_adjoint_omp(const CommGraph& g, std::span<const std::int8_t> sign, int d,
                           std::span<const double> z, std::span<double> out) {
  const int m = g.node_count();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    double* oi = out.data() + static_cast<std::size_t>(i) * d;
    std::fill(oi, oi + d, 0.0);
    for (int e : g.incident_edges(i)) {
      const Edge& edge = g.edges()[e];
      const double s = sign[e];
      const double* ze = z.data() + static_cast<std::size_t>(e) * d;
      if (edge.u == i) {
        for (int c = 0; c < d; ++c) oi[c] += s * ze[c];
      } else {
        for (int c = 0; c < d; ++c) oi[c] -= s * ze[c];
      }
    }
  }
}

}  // namespace pdslide::kernels
