#pragma once
// Dense primal active-set method for  min 0.5 z'Hz + g'z  s.t.  A z <= b,
// started from a feasible point. Independent of the library solver; serves as
// a cross-check oracle on small instances.
#include <Eigen/Dense>
#include <algorithm>
#include <vector>

namespace qp_oracle {

struct Result {
  Eigen::VectorXd z;
  bool ok = false;
  int iters = 0;
};

inline Result solve(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                    const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& z0, int max_iter = 500) {
  using Mat = Eigen::MatrixXd;
  using Vec = Eigen::VectorXd;
  const int n = static_cast<int>(H.rows());
  const int m = static_cast<int>(A.rows());
  Vec z = z0;
  std::vector<int> W;
  Result res;
  for (int it = 0; it < max_iter; ++it) {
    const int k = static_cast<int>(W.size());
    Mat K = Mat::Zero(n + k, n + k);
    K.topLeftCorner(n, n) = H;
    for (int i = 0; i < k; ++i) {
      K.block(n + i, 0, 1, n) = A.row(W[i]);
      K.block(0, n + i, n, 1) = A.row(W[i]).transpose();
    }
    Vec rhs(n + k);
    rhs.head(n) = -(H * z + g);
    rhs.tail(k).setZero();
    const Vec sol = K.fullPivLu().solve(rhs);
    const Vec d = sol.head(n);
    const Vec lam = sol.tail(k);

    if (d.lpNorm<Eigen::Infinity>() <= 1e-11 * (1.0 + z.lpNorm<Eigen::Infinity>())) {
      int drop = -1;
      double most = -1e-9;
      for (int i = 0; i < k; ++i) {
        if (lam(i) < most) {
          most = lam(i);
          drop = i;
        }
      }
      if (drop < 0) {
        res.z = z;
        res.ok = true;
        res.iters = it;
        return res;
      }
      W.erase(W.begin() + drop);
      continue;
    }

    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < m; ++i) {
      if (std::find(W.begin(), W.end(), i) != W.end()) continue;
      const double ad = A.row(i).dot(d);
      if (ad > 1e-14) {
        const double step = (b(i) - A.row(i).dot(z)) / ad;
        if (step < alpha) {
          alpha = step;
          blocking = i;
        }
      }
    }
    z += std::max(alpha, 0.0) * d;
    if (blocking >= 0) W.push_back(blocking);
  }
  res.z = z;
  return res;
}

}  // namespace qp_oracle
