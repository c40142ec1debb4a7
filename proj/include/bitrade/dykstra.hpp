#pragma once

// Dykstra's cyclic projection onto  unit ball ∩ {A v <= c}. Slow but simple;
// kept as an independent reference for the active-set projection.

#include <Eigen/Dense>

#include <vector>

#include "bitrade/geometry.hpp"

namespace bitrade {

template <typename Scalar>
struct DykstraResult {
  VectorX<Scalar> point;
  int sweeps = 0;
  bool converged = false;
};

template <typename Scalar>
DykstraResult<Scalar> dykstra_project(const ConvexRegion<Scalar>& K, const VectorX<Scalar>& y,
                                      int max_sweeps = 10000, Scalar step_tol = Scalar(1e-10)) {
  const MatrixX<Scalar>& A = K.normals();
  const VectorX<Scalar>& c = K.offsets();
  const Eigen::Index m = A.rows();
  const Eigen::Index d = K.dim();

  // One correction vector per set; index m is the ball.
  std::vector<VectorX<Scalar>> corr(static_cast<std::size_t>(m + 1), VectorX<Scalar>::Zero(d));
  DykstraResult<Scalar> out;
  out.point = y;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    const VectorX<Scalar> before = out.point;
    for (Eigen::Index j = 0; j <= m; ++j) {
      VectorX<Scalar>& e = corr[static_cast<std::size_t>(j)];
      const VectorX<Scalar> shifted = out.point + e;
      VectorX<Scalar> proj = shifted;
      if (j < m) {
        const Scalar viol = A.row(j).dot(shifted) - c(j);
        if (viol > Scalar(0)) proj -= viol * A.row(j).transpose();
      } else {
        const Scalar n = shifted.norm();
        if (n > Scalar(1)) proj /= n;
      }
      e = shifted - proj;
      out.point = proj;
    }
    out.sweeps = sweep;
    // Small steps alone can mean a stall on a thin region, so also ask for
    // feasibility before stopping.
    const Scalar viol = m > 0 ? (A * out.point - c).maxCoeff() : Scalar(0);
    if ((out.point - before).norm() < step_tol && viol <= Scalar(1e-9)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

template <typename Scalar>
Scalar dykstra_distance(const ConvexRegion<Scalar>& K, const VectorX<Scalar>& y) {
  return (y - dykstra_project(K, y).point).norm();
}

}  // namespace bitrade
