#include "magwell/poly3.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace magwell {

namespace {
void check_axis(int axis) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("Poly3: axis must be 0, 1 or 2");
}
}  // namespace

Poly3::Poly3(double constant) {
  if (constant != 0.0) terms_[{0, 0, 0}] = constant;
}

Poly3 Poly3::monomial(const Idx3& e, double c) {
  Poly3 p;
  if (e[0] < 0 || e[1] < 0 || e[2] < 0)
    throw std::invalid_argument("Poly3: negative exponent");
  if (c != 0.0) p.terms_[e] = c;
  return p;
}

Poly3 Poly3::variable(int axis) {
  check_axis(axis);
  Idx3 e{0, 0, 0};
  e[axis] = 1;
  return monomial(e, 1.0);
}

double Poly3::coeff(const Idx3& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

void Poly3::set(const Idx3& e, double c) {
  if (c == 0.0)
    terms_.erase(e);
  else
    terms_[e] = c;
}

void Poly3::add_term(const Idx3& e, double c) {
  if (c == 0.0) return;
  double& slot = terms_[e];
  slot += c;
  if (slot == 0.0) terms_.erase(e);
}

int Poly3::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

Poly3 Poly3::operator+(const Poly3& o) const {
  Poly3 r = *this;
  r += o;
  return r;
}

Poly3& Poly3::operator+=(const Poly3& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly3 Poly3::operator-(const Poly3& o) const {
  Poly3 r = *this;
  r -= o;
  return r;
}

Poly3& Poly3::operator-=(const Poly3& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Poly3 Poly3::operator-() const { return *this * -1.0; }

Poly3 Poly3::operator*(const Poly3& o) const {
  Poly3 r;
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_)
      r.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
  return r;
}

Poly3 Poly3::operator*(double s) const {
  Poly3 r;
  if (s == 0.0) return r;
  for (const auto& [e, c] : terms_) r.terms_[e] = c * s;
  return r;
}

Poly3 Poly3::derivative(int axis) const {
  check_axis(axis);
  Poly3 r;
  for (const auto& [e, c] : terms_) {
    if (e[axis] == 0) continue;
    Idx3 d = e;
    d[axis] -= 1;
    r.add_term(d, c * static_cast<double>(e[axis]));
  }
  return r;
}

Poly3 Poly3::antiderivative(int axis) const {
  check_axis(axis);
  Poly3 r;
  for (const auto& [e, c] : terms_) {
    Idx3 d = e;
    d[axis] += 1;
    r.add_term(d, c / static_cast<double>(d[axis]));
  }
  return r;
}

double Poly3::eval(const Eigen::Vector3d& X) const {
  // Cache per-axis powers up to the degree actually present.
  int dmax = total_degree();
  if (dmax < 0) return 0.0;
  std::array<std::array<double, 32>, 3> pw{};
  for (int a = 0; a < 3; ++a) {
    pw[a][0] = 1.0;
    for (int d = 1; d <= dmax && d < 32; ++d) pw[a][d] = pw[a][d - 1] * X[a];
  }
  double s = 0.0;
  for (const auto& [e, c] : terms_) s += c * pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]];
  return s;
}

Eigen::Vector3d Poly3::gradient_at(const Eigen::Vector3d& X) const {
  return {derivative(0).eval(X), derivative(1).eval(X), derivative(2).eval(X)};
}

Poly3 Poly3::compose_affine(const Eigen::Matrix3d& R, const Eigen::Vector3d& t) const {
  // Substitute X_a -> sum_b R(a,b) X_b + t(a) and expand monomial by monomial.
  std::array<Poly3, 3> lin;
  for (int a = 0; a < 3; ++a) {
    lin[a] = Poly3(t[a]);
    for (int b = 0; b < 3; ++b)
      if (R(a, b) != 0.0) lin[a] += Poly3::variable(b) * R(a, b);
  }
  std::array<int, 3> need{0, 0, 0};
  for (const auto& [e, c] : terms_)
    for (int a = 0; a < 3; ++a) need[a] = std::max(need[a], e[a]);
  std::array<std::vector<Poly3>, 3> powers;
  for (int a = 0; a < 3; ++a) {
    powers[a].resize(static_cast<std::size_t>(need[a]) + 1);
    powers[a][0] = Poly3(1.0);
    for (int n = 1; n <= need[a]; ++n) powers[a][n] = powers[a][n - 1] * lin[a];
  }
  Poly3 r;
  for (const auto& [e, c] : terms_) {
    Poly3 term = powers[0][e[0]] * powers[1][e[1]];
    term = term * powers[2][e[2]];
    r += term * c;
  }
  return r;
}

Poly3 Poly3::truncate_total_degree(int dmax) const {
  Poly3 r;
  for (const auto& [e, c] : terms_)
    if (e[0] + e[1] + e[2] <= dmax) r.terms_[e] = c;
  return r;
}

Poly3 Poly3::homogeneous_part(int d) const {
  Poly3 r;
  for (const auto& [e, c] : terms_)
    if (e[0] + e[1] + e[2] == d) r.terms_[e] = c;
  return r;
}

Poly3 Poly3::pruned(double tol) const {
  Poly3 r;
  for (const auto& [e, c] : terms_)
    if (std::abs(c) > tol) r.terms_[e] = c;
  return r;
}

double Poly3::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

bool Poly3::is_zero(double tol) const { return max_abs_coeff() <= tol; }

std::string Poly3::to_string(const std::array<std::string, 3>& vars) const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [e, c] : terms_) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", c);
    if (!out.empty()) out += " + ";
    out += buf;
    for (int a = 0; a < 3; ++a) {
      if (e[a] == 0) continue;
      out += "*" + vars[a];
      if (e[a] > 1) out += "^" + std::to_string(e[a]);
    }
  }
  return out;
}

}  // namespace magwell
