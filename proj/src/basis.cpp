#include "sirl/basis.hpp"

#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sirl {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

BasisSet::BasisSet(int input_dim, std::vector<Exponents> terms) : n_(input_dim), terms_(std::move(terms)) {
  if (n_ < 1) throw std::invalid_argument("basis: input dimension must be positive");
  if (terms_.empty()) throw std::invalid_argument("basis: at least one term is required");
  std::set<Exponents> seen;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& e = terms_[i];
    if (static_cast<int>(e.size()) != n_) {
      throw std::invalid_argument("basis: term " + std::to_string(i) + " has " + std::to_string(e.size()) +
                                  " exponents, expected " + std::to_string(n_));
    }
    int deg = 0;
    for (int k : e) {
      if (k < 0) throw std::invalid_argument("basis: negative exponent in term " + std::to_string(i));
      deg += k;
    }
    if (deg < 1) throw std::invalid_argument("basis: term " + std::to_string(i) + " is constant");
    if (!seen.insert(e).second) throw std::invalid_argument("basis: duplicate term " + std::to_string(i));
  }
}

int BasisSet::degree(int i) const {
  const auto& e = terms_.at(i);
  return std::accumulate(e.begin(), e.end(), 0);
}

namespace {

void check_dim(const Eigen::VectorXd& x, int n) {
  if (x.size() != n) {
    throw std::invalid_argument("basis: state has " + std::to_string(x.size()) + " entries, expected " +
                                std::to_string(n));
  }
}

}  // namespace

Eigen::VectorXd BasisSet::eval(const Eigen::VectorXd& x) const {
  check_dim(x, n_);
  Eigen::VectorXd phi(size());
  for (int i = 0; i < size(); ++i) {
    double v = 1.0;
    for (int j = 0; j < n_; ++j) v *= ipow(x(j), terms_[i][j]);
    phi(i) = v;
  }
  return phi;
}

Eigen::MatrixXd BasisSet::jacobian(const Eigen::VectorXd& x) const {
  check_dim(x, n_);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(size(), n_);
  for (int i = 0; i < size(); ++i) {
    const auto& e = terms_[i];
    for (int k = 0; k < n_; ++k) {
      if (e[k] == 0) continue;
      double v = e[k] * ipow(x(k), e[k] - 1);
      for (int j = 0; j < n_; ++j) {
        if (j != k) v *= ipow(x(j), e[j]);
      }
      jac(i, k) = v;
    }
  }
  return jac;
}

BasisSet BasisSet::homogeneous(int input_dim, int degree) {
  std::vector<Exponents> terms;
  Exponents cur(input_dim, 0);
  // Enumerate exponent vectors summing to `degree`, x1 power descending.
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == input_dim - 1) {
      cur[pos] = remaining;
      terms.push_back(cur);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      cur[pos] = k;
      self(self, pos + 1, remaining - k);
    }
  };
  rec(rec, 0, degree);
  return BasisSet(input_dim, std::move(terms));
}

std::string BasisSet::describe(int i) const {
  std::ostringstream os;
  bool first = true;
  for (int j = 0; j < n_; ++j) {
    const int k = terms_.at(i)[j];
    if (k == 0) continue;
    if (!first) os << '*';
    os << 'x' << (j + 1);
    if (k > 1) os << '^' << k;
    first = false;
  }
  return os.str();
}

}  // namespace sirl
