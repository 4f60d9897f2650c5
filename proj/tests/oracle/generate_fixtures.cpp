// Writes the frozen reference tables under tests/fixtures/ using 100-digit
// arithmetic and closed-form polynomial expansions only (no recurrences).
//
//   generate_fixtures <output-dir>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

using Real = boost::multiprecision::cpp_bin_float_100;

namespace {

Real factorial(int n) {
  Real f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

Real binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// Coefficients c_j of (x^2 - 1)^l in powers of x.
std::vector<Real> rodrigues_poly(int l) {
  std::vector<Real> c(2 * l + 1, Real(0));
  for (int k = 0; k <= l; ++k) c[2 * k] = binomial(l, k) * (((l - k) % 2 == 0) ? 1 : -1);
  return c;
}

std::vector<Real> differentiate(std::vector<Real> c, int times) {
  for (int t = 0; t < times; ++t) {
    if (c.size() <= 1) return {Real(0)};
    std::vector<Real> d(c.size() - 1);
    for (std::size_t j = 1; j < c.size(); ++j) d[j - 1] = c[j] * Real(static_cast<int>(j));
    c = std::move(d);
  }
  return c;
}

Real horner(const std::vector<Real>& c, const Real& x) {
  Real v = 0;
  for (std::size_t j = c.size(); j-- > 0;) v = v * x + c[j];
  return v;
}

// P_l^m(x) = (-1)^m / (2^l l!) (1-x^2)^{m/2} d^{l+m}/dx^{l+m} (x^2-1)^l, any |m| <= l.
Real ferrers(int l, int m, const Real& x) {
  const Real d = horner(differentiate(rodrigues_poly(l), l + m), x);
  Real pre = ((m % 2 == 0) ? Real(1) : Real(-1)) / (pow(Real(2), l) * factorial(l));
  if (m != 0) pre *= pow(1 - x * x, Real(m) / 2);
  return pre * d;
}

Real normalized(int l, int m, const Real& x) {
  const Real four_pi = 4 * boost::math::constants::pi<Real>();
  return sqrt(Real(2 * l + 1) / four_pi * factorial(l - m) / factorial(l + m)) * ferrers(l, m, x);
}

// P_k^{(a,a)}(x) for integer a >= 0 from Rodrigues' formula:
// (-1)^k / (2^k k!) (1-x^2)^{-a} d^k/dx^k (1-x^2)^{a+k}.
Real jacobi_symmetric(int k, int a, const Real& x) {
  const int n = a + k;
  std::vector<Real> c(2 * n + 1, Real(0));
  for (int j = 0; j <= n; ++j) c[2 * j] = binomial(n, j) * ((j % 2 == 0) ? 1 : -1);
  const Real d = horner(differentiate(c, k), x);
  return ((k % 2 == 0) ? Real(1) : Real(-1)) / (pow(Real(2), k) * factorial(k)) * d / pow(1 - x * x, a);
}

Real bessel_series(const Real& nu, const Real& z) {
  const Real h = z / 2;
  Real term = pow(h, nu) / boost::multiprecision::tgamma(nu + 1);
  Real sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= -(h * h) / (Real(k) * (Real(k) + nu));
    sum += term;
  }
  return sum;
}

std::string fmt(const Real& v) {
  std::ostringstream os;
  os << std::setprecision(16) << std::scientific << static_cast<double>(v);
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: generate_fixtures <output-dir>\n";
    return 1;
  }
  const std::string dir = argv[1];
  const Real pi = boost::math::constants::pi<Real>();

  {
    std::ofstream out(dir + "/profile_oracle.csv");
    out << "l,m,x,value\n";
    for (int l = 0; l <= 30; ++l)
      for (int m = -l; m <= l; ++m)
        for (int k = 0; k < 21; ++k) {
          const Real x = cos(Real(2 * k + 1) * pi / 42);
          // The abscissa is frozen at double precision; the value refers to it exactly.
          const Real xd = Real(static_cast<double>(x));
          out << l << ',' << m << ',' << fmt(xd) << ',' << fmt(normalized(l, m, xd)) << '\n';
        }
  }
  {
    std::ofstream out(dir + "/polynomial_oracle.csv");
    out << "kind,degree,param,x,value\n";
    for (int l : {0, 1, 2, 3, 7, 20})
      for (double x : {-0.9, -0.5, 0.0, 0.25, 0.5, 1.0})
        out << "legendre," << l << ",0," << fmt(Real(x)) << ',' << fmt(horner(differentiate(rodrigues_poly(l), l), Real(x)) /
                                                                         (pow(Real(2), l) * factorial(l)))
            << '\n';
    for (int k : {0, 1, 2, 5})
      for (int a : {0, 1, 2})
        for (double x : {-0.7, 0.0, 0.5, 0.9})
          out << "jacobi_sym," << k << ',' << a << ',' << fmt(Real(x)) << ',' << fmt(jacobi_symmetric(k, a, Real(x)))
              << '\n';
  }
  {
    std::ofstream out(dir + "/bessel_oracle.csv");
    out << "nu,z,value\n";
    for (double nu : {-0.5, -0.25, 0.0, 0.5, 1.0, 2.5, 5.0, 10.0, 20.0})
      for (double z : {0.1, 1.0, 2.5, 5.0, 10.0, 17.5, 25.0, 40.0, 50.0})
        out << fmt(Real(nu)) << ',' << fmt(Real(z)) << ',' << fmt(bessel_series(Real(nu), Real(z))) << '\n';
  }
  return 0;
}
