#pragma once
// Thin wrappers over GSL's Nelder-Mead simplex and Boost's Brent minimizer.

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace lcft {

struct MinimizeResult {
  Eigen::VectorXd x;
  double fx = 0.0;
  int iterations = 0;
};

/// Unconstrained derivative-free minimization of f from x0 with initial simplex
/// size `step`; stops when the simplex size drops below `size_tol`, or when
/// `stall_rel > 0` and the best value improved by less than stall_rel * |f| over
/// the last 10 * dim iterations.
inline MinimizeResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                                  double step, double size_tol = 1e-10, int max_iter = 2000, double stall_rel = 0.0) {
  const auto n = static_cast<size_t>(x0.size());
  struct Ctx {
    const std::function<double(const Eigen::VectorXd&)>* f;
    Eigen::VectorXd buf;
  } ctx{&f, Eigen::VectorXd(x0.size())};
  gsl_multimin_function fn;
  fn.n = n;
  fn.params = &ctx;
  fn.f = [](const gsl_vector* v, void* p) {
    auto* c = static_cast<Ctx*>(p);
    for (size_t i = 0; i < v->size; ++i) c->buf(static_cast<Eigen::Index>(i)) = gsl_vector_get(v, i);
    return (*c->f)(c->buf);
  };
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* ss = gsl_vector_alloc(n);
  for (size_t i = 0; i < n; ++i) gsl_vector_set(x, i, x0(static_cast<Eigen::Index>(i)));
  gsl_vector_set_all(ss, step);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, ss);
  int it = 0;
  double ref = s->fval;
  int since = 0;
  for (; it < max_iter; ++it) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), size_tol) == GSL_SUCCESS) break;
    if (stall_rel > 0.0) {
      if (ref - s->fval > stall_rel * std::abs(ref)) {
        ref = s->fval;
        since = 0;
      } else if (++since >= 10 * static_cast<int>(n)) {
        ++it;
        break;
      }
    }
  }
  MinimizeResult r;
  r.x = Eigen::VectorXd(x0.size());
  for (size_t i = 0; i < n; ++i) r.x(static_cast<Eigen::Index>(i)) = gsl_vector_get(s->x, i);
  r.fx = s->fval;
  r.iterations = it;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(x);
  gsl_vector_free(ss);
  return r;
}

/// Brent minimization of f on [a, b].
inline std::pair<double, double> brent_minimize(const std::function<double(double)>& f, double a, double b,
                                                int bits = 40, std::uintmax_t max_iter = 200) {
  return boost::math::tools::brent_find_minima(f, a, b, bits, max_iter);
}

}  // namespace lcft
