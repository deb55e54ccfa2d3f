#pragma once

// Data-parallel building blocks shared by the smoothers and the boosting
// recursion. `par::` functions use OpenMP; `serial::` functions are the plain
// reference implementations the tests compare against.

#include "boostsmooth/types.hpp"

namespace boostsmooth {

namespace par {

/// G(i, j) = K_h(queries(i) - design(j)).
Matrix kernel_gram(const Vector& queries, const Vector& design, const KernelSpec& spec);

/// Divides each row by its sum. Throws KernelSupportError on a zero row.
void normalize_rows(Matrix& weights);

/// out = a * x.
void matvec(const Matrix& a, const Vector& x, Vector& out);

/// Row i holds 1/K on the K nearest design points to queries(i) (ties by
/// ascending index), 0 elsewhere.
Matrix knn_weights(const Vector& queries, const Vector& design, std::size_t neighbors);

}  // namespace par

namespace serial {

Matrix kernel_gram(const Vector& queries, const Vector& design, const KernelSpec& spec);
void normalize_rows(Matrix& weights);
void matvec(const Matrix& a, const Vector& x, Vector& out);
Matrix knn_weights(const Vector& queries, const Vector& design, std::size_t neighbors);

}  // namespace serial

/// Indices of the K nearest design points to q, ordered by (distance, index).
std::vector<std::size_t> nearest_indices(const Vector& design, double q, std::size_t neighbors);

}  // namespace boostsmooth
