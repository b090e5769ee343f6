#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pdslide/graph.hpp"

// Matrix-free consensus kernels. Each comes as a serial reference and an
// OpenMP variant; both evaluate every output entry with the same summation
// order, so their results agree bit for bit.
namespace pdslide::kernels {

enum class Exec { serial, omp };

/// out = (L (x) I_d) x, rows of L walked over N_i in ascending order.
void laplacian_apply_serial(const CommGraph& g, int d, std::span<const double> x, std::span<double> out);
void laplacian_apply_omp(const CommGraph& g, int d, std::span<const double> x, std::span<double> out);

/// out = (B^T (x) I_d) x, one block per edge: sign_e * (x_u - x_v).
void incidence_apply_serial(const CommGraph& g, std::span<const std::int8_t> sign, int d,
                            std::span<const double> x, std::span<double> out);
void incidence_apply_omp(const CommGraph& g, std::span<const std::int8_t> sign, int d,
                         std::span<const double> x, std::span<double> out);

/// out = (B (x) I_d) z. The serial version scatters edge by edge; the OpenMP
/// version gathers per node over incident edges in the same ascending order.
void incidence_adjoint_serial(const CommGraph& g, std::span<const std::int8_t> sign, int d,
                              std::span<const double> z, std::span<double> out);
void incidence_adjoint_omp(const CommGraph& g, std::span<const std::int8_t> sign, int d,
                           std::span<const double> z, std::span<double> out);

}  // namespace pdslide::kernels
