#include "rave/tridiag.hpp"

#include <cmath>

namespace rave {

std::vector<double> SymTridiag::apply(const std::vector<double>& x) const {
  const std::size_t n = size();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += off[i - 1] * x[i - 1];
    if (i + 1 < n) s += off[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

double SymTridiag::quadform(const std::vector<double>& x) const {
  const std::size_t n = size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += diag[i] * x[i] * x[i];
  for (std::size_t i = 0; i + 1 < n; ++i) s += 2.0 * off[i] * x[i] * x[i + 1];
  return s;
}

SymTridiag add(const SymTridiag& a, const SymTridiag& b) {
  SymTridiag c = a;
  for (std::size_t i = 0; i < c.diag.size(); ++i) c.diag[i] += b.diag[i];
  for (std::size_t i = 0; i < c.off.size(); ++i) c.off[i] += b.off[i];
  return c;
}

SymTridiag scaled(const SymTridiag& a, double s) {
  SymTridiag c = a;
  for (double& v : c.diag) v *= s;
  for (double& v : c.off) v *= s;
  return c;
}

void TridiagLDLT::factor(const SymTridiag& a) {
  const std::size_t n = a.size();
  d_.assign(n, 0.0);
  l_.assign(n > 0 ? n - 1 : 0, 0.0);
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double di = a.diag[i];
    if (i > 0) di -= l_[i - 1] * l_[i - 1] * prev;
    if (!(di > 0.0) || !std::isfinite(di)) {
      d_.clear();
      fail(ErrorCode::SingularSystem,
           "non-positive pivot in tridiagonal LDL^T");
    }
    d_[i] = di;
    if (i + 1 < n) l_[i] = a.off[i] / di;
    prev = di;
  }
}

std::vector<double> TridiagLDLT::solve(const std::vector<double>& rhs) const {
  const std::size_t n = d_.size();
  std::vector<double> x = rhs;
  for (std::size_t i = 1; i < n; ++i) x[i] -= l_[i - 1] * x[i - 1];
  for (std::size_t i = 0; i < n; ++i) x[i] /= d_[i];
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= l_[i] * x[i + 1];
  return x;
}

}  // namespace rave
