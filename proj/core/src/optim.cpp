#include "ladder/optim.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace ladder {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Bounds Bounds::unbounded(int dim) {
  Bounds b;
  b.lower = Eigen::VectorXd::Constant(dim, -kInf);
  b.upper = Eigen::VectorXd::Constant(dim, kInf);
  return b;
}

bool Bounds::contains(const Eigen::VectorXd& x) const {
  for (int i = 0; i < x.size(); ++i)
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  return true;
}

Eigen::VectorXd Bounds::clamp(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = x;
  for (int i = 0; i < x.size(); ++i)
    out[i] = std::min(std::max(out[i], lower[i]), upper[i]);
  return out;
}

double huber(double r, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("huber: delta must be > 0");
  double a = std::abs(r);
  if (a <= delta) return 0.5 * r * r;
  return delta * (a - 0.5 * delta);
}

Eigen::VectorXd numerical_gradient(const Objective& f, const Eigen::VectorXd& x,
                                   double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (int i = 0; i < x.size(); ++i) {
    double hi = h * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + hi;
    double fp = f(xp);
    xp[i] = x[i] - hi;
    double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * hi);
  }
  return g;
}

Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x,
                                  double h) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd xt = x;
  auto eval = [&](int i, double si, int j, double sj) {
    xt[i] += si;
    xt[j] += sj;
    double v = f(xt);
    xt[i] = x[i];
    xt[j] = x[j];
    return v;
  };
  double f0 = f(x);
  for (int i = 0; i < n; ++i) {
    double hi = h * std::max(1.0, std::abs(x[i]));
    for (int j = 0; j <= i; ++j) {
      double hj = h * std::max(1.0, std::abs(x[j]));
      double v;
      if (i == j) {
        v = (eval(i, hi, j, 0) - 2.0 * f0 + eval(i, -hi, j, 0)) / (hi * hi);
      } else {
        v = (eval(i, hi, j, hj) - eval(i, hi, j, -hj) - eval(i, -hi, j, hj) +
             eval(i, -hi, j, -hj)) /
            (4.0 * hi * hj);
      }
      H(i, j) = v;
      H(j, i) = v;
    }
  }
  return 0.5 * (H + H.transpose());
}

namespace {

Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                   const Bounds& b) {
  Eigen::VectorXd pg = g;
  for (int i = 0; i < x.size(); ++i) {
    if (x[i] <= b.lower[i] && g[i] > 0.0) pg[i] = 0.0;
    if (x[i] >= b.upper[i] && g[i] < 0.0) pg[i] = 0.0;
  }
  return pg;
}

// Two-loop recursion over L-BFGS curvature pairs.
Eigen::VectorXd lbfgs_direction(const std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& hist,
                                const Eigen::VectorXd& g) {
  Eigen::VectorXd q = g;
  std::vector<double> alpha(hist.size());
  std::vector<double> rho(hist.size());
  for (int i = static_cast<int>(hist.size()) - 1; i >= 0; --i) {
    const auto& [s, y] = hist[static_cast<std::size_t>(i)];
    rho[static_cast<std::size_t>(i)] = 1.0 / y.dot(s);
    alpha[static_cast<std::size_t>(i)] = rho[static_cast<std::size_t>(i)] * s.dot(q);
    q -= alpha[static_cast<std::size_t>(i)] * y;
  }
  if (!hist.empty()) {
    const auto& [s, y] = hist.back();
    q *= s.dot(y) / y.dot(y);
  }
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const auto& [s, y] = hist[i];
    double beta = rho[i] * y.dot(q);
    q += (alpha[i] - beta) * s;
  }
  return -q;
}

} // namespace

OptResult minimize_bounded(const Objective& objective, const Eigen::VectorXd& x0,
                           const Bounds& bounds, const FitConfig& cfg) {
  if (x0.size() != bounds.lower.size() || x0.size() != bounds.upper.size())
    throw std::invalid_argument("minimize_bounded: dimension mismatch");

  Eigen::VectorXd x = bounds.clamp(x0);
  double f = objective(x);
  if (!std::isfinite(f))
    throw std::invalid_argument("minimize_bounded: objective non-finite at x0");

  Eigen::VectorXd g = numerical_gradient(objective, x);
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> hist;
  const std::size_t memory = 10;
  const double c1 = 1e-4;

  OptResult res;
  res.params = x;
  res.objective = f;

  int flat_iters = 0;
  bool hist_was_reset = false;
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    Eigen::VectorXd pg = projected_gradient(x, g, bounds);
    res.grad_norm = pg.lpNorm<Eigen::Infinity>();
    if (res.grad_norm < cfg.gradient_tol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd d = hist.empty() ? Eigen::VectorXd(-g) : lbfgs_direction(hist, g);
    if (!d.allFinite() || d.dot(g) > -1e-14 * d.norm() * g.norm()) d = -g;

    double t = 1.0;
    double f_new = kInf;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = bounds.clamp(x + t * d);
      Eigen::VectorXd dx = x_new - x;
      if (dx.lpNorm<Eigen::Infinity>() == 0.0) break;
      f_new = objective(x_new);
      if (std::isfinite(f_new) && f_new <= f + c1 * g.dot(dx)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }

    if (!accepted) {
      if (!hist.empty() && !hist_was_reset) {
        hist.clear();
        hist_was_reset = true;
        continue; // retry as steepest descent
      }
      break; // no further progress possible at this resolution
    }
    hist_was_reset = false;

    Eigen::VectorXd g_new = numerical_gradient(objective, x_new);
    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    if (s.dot(y) > 1e-10 * s.norm() * y.norm()) {
      hist.emplace_back(s, y);
      if (hist.size() > memory) hist.pop_front();
    }

    double rel_drop = (f - f_new) / std::max(std::abs(f), 1e-30);
    flat_iters = rel_drop < cfg.convergence_tol ? flat_iters + 1 : 0;

    x = x_new;
    f = f_new;
    g = g_new;
    if (flat_iters >= 5) {
      res.converged = true;
      ++it;
      break;
    }
  }

  res.params = x;
  res.objective = f;
  res.iterations = it;
  Eigen::VectorXd pg = projected_gradient(x, g, bounds);
  res.grad_norm = pg.lpNorm<Eigen::Infinity>();
  if (res.grad_norm < cfg.gradient_tol) res.converged = true;
  return res;
}

OptResult least_squares(
    const std::function<double(const Eigen::VectorXd&, double)>& model,
    std::span<const std::pair<double, double>> data, const Eigen::VectorXd& p0,
    const FitConfig& cfg) {
  const int n = static_cast<int>(p0.size());
  const int m = static_cast<int>(data.size());
  if (m < n)
    throw std::invalid_argument("least_squares: need at least as many points as parameters");

  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i) r[i] = model(p, data[i].first) - data[i].second;
    return r;
  };
  auto jacobian = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd J(m, n);
    Eigen::VectorXd pt = p;
    for (int j = 0; j < n; ++j) {
      double h = 1e-6 * std::max(1.0, std::abs(p[j]));
      pt[j] = p[j] + h;
      Eigen::VectorXd rp = residuals(pt);
      pt[j] = p[j] - h;
      Eigen::VectorXd rm = residuals(pt);
      pt[j] = p[j];
      J.col(j) = (rp - rm) / (2.0 * h);
    }
    return J;
  };

  Eigen::VectorXd p = p0;
  Eigen::VectorXd r = residuals(p);
  double cost = r.squaredNorm();
  if (!std::isfinite(cost))
    throw std::invalid_argument("least_squares: residuals non-finite at p0");

  OptResult res;
  res.params = p;
  res.objective = cost;

  double lambda = 1e-3;
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    Eigen::MatrixXd J = jacobian(p);
    if (!J.allFinite()) break;
    Eigen::MatrixXd A = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * r;
    res.grad_norm = g.lpNorm<Eigen::Infinity>();

    // rank check on the final-iterate Jacobian
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    double emax = es.eigenvalues().maxCoeff();
    res.degenerate = !(emax > 0.0) || es.eigenvalues().minCoeff() < 1e-12 * emax;

    bool accepted = false;
    Eigen::VectorXd p_new;
    double cost_new = cost;
    for (int inner = 0; inner < 30; ++inner) {
      Eigen::MatrixXd M = A;
      for (int d = 0; d < n; ++d)
        M(d, d) += lambda * std::max(A(d, d), 1e-12);
      Eigen::VectorXd delta = M.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      p_new = p + delta;
      Eigen::VectorXd r_new = residuals(p_new);
      cost_new = r_new.squaredNorm();
      if (std::isfinite(cost_new) && cost_new < cost) {
        r = r_new;
        accepted = true;
        lambda = std::max(lambda / 10.0, 1e-15);
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) break;

    double rel_drop = (cost - cost_new) / std::max(cost, 1e-300);
    double step = (p_new - p).norm();
    p = p_new;
    cost = cost_new;
    if (rel_drop < cfg.convergence_tol || step < 1e-14 * (p.norm() + 1.0)) {
      res.converged = true;
      ++it;
      break;
    }
  }

  res.params = p;
  res.objective = cost;
  res.iterations = it;
  if (res.degenerate) res.converged = false;
  return res;
}

OptResult multistart(const std::function<OptResult(const Eigen::VectorXd&)>& minimize_one,
                     std::span<const Eigen::VectorXd> starts) {
  if (starts.empty()) throw std::invalid_argument("multistart: no starts given");
  bool have = false;
  OptResult best;
  std::string errors;
  for (const auto& x0 : starts) {
    try {
      OptResult r = minimize_one(x0);
      if (!have || r.objective < best.objective) {
        best = std::move(r);
        have = true;
      }
    } catch (const std::exception& e) {
      errors += errors.empty() ? e.what() : std::string("; ") + e.what();
    }
  }
  if (!have) throw std::runtime_error("multistart: all starts failed: " + errors);
  return best;
}

} // namespace ladder
