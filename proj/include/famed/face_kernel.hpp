#pragma once

#include "famed/rational_matrix.hpp"
#include "famed/triangulation.hpp"

namespace famed {

/// Face adjacency matrices of an ordered triangulation: X_k is the N x 2N
/// one-hot matrix of the face-opposite-vertex-k map, columns in canonical
/// face order. A and B are the stacked blocks that enter the kinematical
/// kernel, Eps the diagonal sign matrix.
struct FaceMatrices {
  RationalMatrix X0, X1, X2, X3;  // N x 2N
  RationalMatrix A;               // 2N x 2N = [X0 - X1 + X2; X2 - X3]
  RationalMatrix B;               // 2N x N  = [0; Eps]
  RationalMatrix Eps;             // N x N diagonal
};

inline FaceMatrices build_face_matrices(const OrderedTriangulation& t) {
  const int n = t.N;
  FaceMatrices f{RationalMatrix(n, 2 * n), RationalMatrix(n, 2 * n), RationalMatrix(n, 2 * n),
                 RationalMatrix(n, 2 * n), RationalMatrix(), RationalMatrix(),
                 RationalMatrix(n, n)};
  for (int j = 0; j < n; ++j) {
    f.X0(j, t.face_class_of[j][0]) = Rational(1);
    f.X1(j, t.face_class_of[j][1]) = Rational(1);
    f.X2(j, t.face_class_of[j][2]) = Rational(1);
    f.X3(j, t.face_class_of[j][3]) = Rational(1);
    f.Eps(j, j) = Rational(t.sign[j]);
  }
  f.A = RationalMatrix::vcat(f.X0 - f.X1 + f.X2, f.X2 - f.X3);
  f.B = RationalMatrix::vcat(RationalMatrix(n, n), f.Eps);
  return f;
}

/// Reduced kinematical-kernel data: the two-sided reduction of A, the delta
/// block that imposes the 2n linear constraints, and the symmetric quadratic
/// form Q with G = Q + (Eps + Id)/2.
struct KernelReduction {
  int r = 0, n = 0;
  TwoSidedWitness w;            // elem1 * A * elem2 = [[Id_r,0],[0,0]]
  RationalMatrix X0E2_r, X0E2_n;  // N x r, N x n
  RationalMatrix E1B_r, E1B_n;    // r x N, n x N
  RationalMatrix delta_block;     // 2n x N, stacked [X0E2_n^T; E1B_n]
  RationalMatrix G;               // N x N
  RationalMatrix Q;               // N x N symmetric
};

inline KernelReduction reduce_kernel(const FaceMatrices& f) {
  KernelReduction k;
  const int n2 = f.A.rows();  // 2N
  const int N = n2 / 2;
  k.w = two_sided_reduce(f.A);
  k.r = k.w.rank;
  k.n = n2 - k.r;
  const RationalMatrix x0e2 = f.X0 * k.w.elem2;
  const RationalMatrix e1b = k.w.elem1 * f.B;
  k.X0E2_r = x0e2.block(0, 0, N, k.r);
  k.X0E2_n = x0e2.block(0, k.r, N, k.n);
  k.E1B_r = e1b.block(0, 0, k.r, N);
  k.E1B_n = e1b.block(k.r, 0, k.n, N);
  k.delta_block = RationalMatrix::vcat(k.X0E2_n.transpose(), k.E1B_n);
  const RationalMatrix m = k.X0E2_r * k.E1B_r;
  k.Q = m + m.transpose();
  // G = Q + (Eps + Id)/2, i.e. +1 on the diagonal at positive tetrahedra.
  k.G = k.Q;
  const Rational half(1, 2);
  for (int i = 0; i < N; ++i) k.G(i, i) = k.Q(i, i) + (f.Eps(i, i) + Rational(1)) * half;
  return k;
}

}  // namespace famed
