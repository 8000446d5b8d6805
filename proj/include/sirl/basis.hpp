#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sirl {

using Exponents = std::vector<int>;

/// Ordered set of monomials  phi_i(x) = prod_j x_j^{e_ij}.
///
/// Every term has total degree >= 1, so phi(0) = 0. Terms keep the order in
/// which they are given; weight vectors are indexed the same way.
class BasisSet {
 public:
  BasisSet(int input_dim, std::vector<Exponents> terms);

  int input_dim() const { return n_; }
  int size() const { return static_cast<int>(terms_.size()); }
  const std::vector<Exponents>& terms() const { return terms_; }
  int degree(int i) const;

  Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
  /// Row i is the gradient of term i.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

  /// All monomials of exactly the given total degree, graded lexicographic
  /// (x1^d first). Handy for building quadratic critic bases.
  static BasisSet homogeneous(int input_dim, int degree);

  std::string describe(int i) const;

 private:
  int n_;
  std::vector<Exponents> terms_;
};

}  // namespace sirl
