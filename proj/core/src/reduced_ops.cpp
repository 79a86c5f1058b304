#include "magwell/reduced_ops.hpp"

namespace magwell {

ReducedOperators build_reduced_operators(const NormalFormCoeffs& c) {
  using Op = PolyDiffOp;
  const Op X = Op::position(Var::X);
  const Op DX = Op::momentum(Var::X);
  const Op ETA = Op::position(Var::Eta);
  const Op DETA = Op::momentum(Var::Eta);
  const Op Z = Op::position(Var::Z);
  const Op DZ = Op::momentum(Var::Z);

  const double b0 = c.b0;
  const double c11 = c.cQ(0, 0), c12 = c.cQ(0, 1), c13 = c.cQ(0, 2);
  const double c22 = c.cQ(1, 1), c23 = c.cQ(1, 2), c33 = c.cQ(2, 2);
  const double b13 = c.bQ(0, 2), b23 = c.bQ(1, 2), b33 = c.bQ(2, 2);
  const double a23 = c.aQ(1, 2), a33 = c.aQ(2, 2);
  const double r333 = NormalFormCoeffs::mono(c.C3, 0, 0, 3);
  const double r133 = NormalFormCoeffs::mono(c.C3, 1, 0, 2);
  const double r233 = NormalFormCoeffs::mono(c.C3, 0, 1, 2);
  const double q333 = NormalFormCoeffs::mono(c.C2, 0, 0, 3);
  const double p333 = NormalFormCoeffs::mono(c.C1, 0, 0, 3);
  const double d3 = c.delta[2];
  const double be1 = c.beta1(), be2 = c.beta2(), be3 = c.beta3();
  const double al2 = c.alpha2();

  ReducedOperators R;
  R.S = X + ETA * (1.0 / b0);
  R.W = DX * (1.0 / b0) + Z * Z * (be3 / (2.0 * b0)) - DETA;
  R.Dzt = DZ + X * Z * be3;
  const Op& S = R.S;
  const Op& W = R.W;
  const Op& Dzt = R.Dzt;

  R.P0 = DX * DX + X * X * (b0 * b0);

  R.P2 = X * S * Z * Z * (2.0 * b0 * c33) + Dzt * Dzt;

  R.P3 = X * S * S * Z * (2.0 * b0 * c13)
       + (X * S * W * Z + S * W * Z * X) * (2.0 * b0 * c23)
       + S * Z * Z * Z * X * (2.0 * r333 * b0)
       + (S * S * be1 + S * W * (2.0 * be2) - W * W * al2) * Dzt
       + (S * b33 - W * a33) * (Dzt * Z * Z + Z * Z * Dzt);

  const Op G = S * S * S * (c11 / 3.0) + S * S * W * c12 + S * W * W * c22
             + S * S * Z * Z * (0.5 * r133) + S * W * Z * Z * r233
             + S * Z * Z * Z * Z * d3;
  const Op K = S * S * Z * b13 + S * W * Z * (2.0 * b23) - W * W * Z * a23
             + S * Z * Z * Z * q333 - W * Z * Z * Z * p333;
  const Op V = S * S * (0.5 * be1) + S * W * be2 - W * W * (0.5 * al2)
             + S * Z * Z * b33 - W * Z * Z * a33;

  R.P4 = X * G * b0 + G * X * b0 + S * S * Z * Z * Z * Z * (c33 * c33)
       + Dzt * K + K * Dzt + V * V;

  return R;
}

}  // namespace magwell
