#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>

namespace magwell {

using Idx3 = std::array<int, 3>;

// Trivariate real polynomial with sparse monomial storage.
// Coefficient operations (sum, product, derivative, antiderivative, affine
// recomposition) are carried out exactly in double arithmetic; keys are kept
// in a sorted map so iteration order, and hence all floating-point sums,
// are deterministic.
class Poly3 {
public:
  // Degree guard applied when validating *input* potentials; internal
  // intermediates (e.g. |B|^2) may exceed it.
  static constexpr int kInputDegreeCap = 8;

  Poly3() = default;
  explicit Poly3(double constant);
  static Poly3 monomial(const Idx3& e, double c);
  static Poly3 variable(int axis);  // x, y or z

  double coeff(const Idx3& e) const;
  void set(const Idx3& e, double c);
  void add_term(const Idx3& e, double c);

  bool empty() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  int total_degree() const;  // -1 for the zero polynomial

  const std::map<Idx3, double>& terms() const { return terms_; }

  Poly3 operator+(const Poly3& o) const;
  Poly3 operator-(const Poly3& o) const;
  Poly3 operator*(const Poly3& o) const;
  Poly3 operator*(double s) const;
  Poly3 operator-() const;
  Poly3& operator+=(const Poly3& o);
  Poly3& operator-=(const Poly3& o);

  Poly3 derivative(int axis) const;
  // Antiderivative in `axis` vanishing on {X_axis = 0}.
  Poly3 antiderivative(int axis) const;

  double eval(const Eigen::Vector3d& X) const;
  Eigen::Vector3d gradient_at(const Eigen::Vector3d& X) const;

  // p(R*X + t), expanded exactly; degree is preserved.
  Poly3 compose_affine(const Eigen::Matrix3d& R, const Eigen::Vector3d& t) const;

  Poly3 truncate_total_degree(int dmax) const;
  Poly3 homogeneous_part(int d) const;

  // Drops coefficients with |c| <= tol (used after float recompositions).
  Poly3 pruned(double tol) const;

  double max_abs_coeff() const;
  bool is_zero(double tol) const;

  std::string to_string(const std::array<std::string, 3>& vars = {"x", "y", "z"}) const;

private:
  std::map<Idx3, double> terms_;
};

inline Poly3 operator*(double s, const Poly3& p) { return p * s; }

}  // namespace magwell
