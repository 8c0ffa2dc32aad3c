#pragma once

#include <cstddef>
#include <vector>

#include "rave/errors.hpp"

namespace rave {

// Symmetric tridiagonal matrix, the assembled form of every 1D P1 operator
// used here. diag has n entries, off has n-1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const noexcept { return diag.size(); }

  std::vector<double> apply(const std::vector<double>& x) const;

  // x^T A x
  double quadform(const std::vector<double>& x) const;

  double sym_defect() const noexcept { return 0.0; }  // symmetric by storage
};

SymTridiag add(const SymTridiag& a, const SymTridiag& b);
SymTridiag scaled(const SymTridiag& a, double s);

// LDL^T factorization of a positive definite SymTridiag. Throws
// SingularSystem if a pivot is not strictly positive.
class TridiagLDLT {
 public:
  TridiagLDLT() = default;
  explicit TridiagLDLT(const SymTridiag& a) { factor(a); }

  void factor(const SymTridiag& a);
  std::vector<double> solve(const std::vector<double>& rhs) const;

  bool ready() const noexcept { return !d_.empty(); }

 private:
  std::vector<double> d_;  // pivots
  std::vector<double> l_;  // subdiagonal multipliers
};

}  // namespace rave
