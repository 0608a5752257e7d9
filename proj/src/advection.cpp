// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "tvdmood/advection.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace tvdmood {

void ScalarProblemSpec::validate() const {
  if (!(c_m > 0.0)) throw std::invalid_argument("scalar problem: c_m must be positive");
  if (!(c_a > 0.0)) throw std::invalid_argument("scalar problem: c_a must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("scalar problem: epsilon must be positive");
  if (!(domain_length > 0.0))
    throw std::invalid_argument("scalar problem: domain_length must be positive");
  if (n < 3) throw std::invalid_argument("scalar problem: need at least 3 cells");
}

State upwind_op(const State& w, double speed, double dx) {
  const std::size_t n = w.size();
  State out(n);
  const double f = speed / dx;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm = (j + n - 1) % n;
    out[j] = -f * (w[j] - w[jm]);
  }
  return out;
}

State central_op(const State& w, double speed, double dx) {
  const std::size_t n = w.size();
  State out(n);
  const double f = speed / (2.0 * dx);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm = (j + n - 1) % n;
    const std::size_t jp = (j + 1) % n;
    out[j] = -f * (w[jp] - w[jm]);
  }
  return out;
}

namespace {

double minmod3(double a, double b, double c) {
  if (a > 0.0 && b > 0.0 && c > 0.0) return std::min({a, b, c});
  if (a < 0.0 && b < 0.0 && c < 0.0) return std::max({a, b, c});
  return 0.0;
}

}  // namespace

Reconstruction reconstruct3(const State& w, bool limited) {
  const std::size_t n = w.size();
  Reconstruction r{State(n), State(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm = (j + n - 1) % n;
    const std::size_t jp = (j + 1) % n;
    // Undivided slopes; the dx factors cancel against the dx/2 in the
    // interface offsets.
    const double a = w[j] - w[jm];
    const double b = w[jp] - w[j];
    double plus = w[j] + (a + 2.0 * b) / 6.0;
    double minus = w[j] - (b + 2.0 * a) / 6.0;
    if (limited) {
      const bool smooth = a * b > 0.0 && a / b >= 0.25 && a / b <= 4.0;
      if (!smooth) {
        plus = w[j] + 0.5 * minmod3(2.0 * a, (a + 2.0 * b) / 3.0, 2.0 * b);
        minus = w[j] - 0.5 * minmod3(2.0 * b, (b + 2.0 * a) / 3.0, 2.0 * a);
        const double lo = std::min({w[jm], w[j], w[jp]});
        const double hi = std::max({w[jm], w[j], w[jp]});
        plus = std::clamp(plus, lo, hi);
        minus = std::clamp(minus, lo, hi);
      }
    }
    r.plus[j] = plus;
    r.minus[j] = minus;
  }
  return r;
}

namespace {

State reconstructed_tendency(const State& w, double speed, double dx, bool limited) {
  const std::size_t n = w.size();
  const Reconstruction r = reconstruct3(w, limited);
  State out(n);
  const double f = speed / dx;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t jm = (j + n - 1) % n;
    out[j] = -f * (r.plus[j] - r.plus[jm]);
  }
  return out;
}

}  // namespace

State parabolic3_op(const State& w, double speed, double dx) {
  return reconstructed_tendency(w, speed, dx, false);
}

State limited3_op(const State& w, double speed, double dx) {
  return reconstructed_tendency(w, speed, dx, true);
}

State solve_upwind_periodic(double nu, const State& rhs) {
  const std::size_t n = rhs.size();
  if (!(nu >= 0.0)) throw std::invalid_argument("solve_upwind_periodic: nu must be >= 0");
  if (nu == 0.0) return rhs;
  const double d = 1.0 + nu;
  const double kappa = nu / d;
  // Particular solution with x_{-1} = 0, then add the homogeneous mode
  // kappa^{j+1} scaled to restore periodicity.
  State x(n);
  double prev = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = (rhs[j] + nu * prev) / d;
    prev = x[j];
  }
  const double kn = std::pow(kappa, static_cast<double>(n));
  const double alpha = x[n - 1] / (1.0 - kn);
  double h = kappa;
  for (std::size_t j = 0; j < n; ++j) {
    x[j] += alpha * h;
    h *= kappa;
  }
  return x;
}

namespace {

struct FftBuf1d {
  fftw_complex* p = nullptr;
  explicit FftBuf1d(int n) : p(fftw_alloc_complex(static_cast<std::size_t>(n))) {}
  FftBuf1d(const FftBuf1d&) = delete;
  FftBuf1d& operator=(const FftBuf1d&) = delete;
  ~FftBuf1d() { fftw_free(p); }
};

struct Dft1d {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// Plan creation is not thread safe; execution via the new-array interface on
// fftw_malloc'ed buffers is.
const Dft1d& dft_for(int n) {
  static std::mutex mtx;
  static std::unordered_map<int, Dft1d> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) {
    FftBuf1d tmp(n);
    Dft1d d;
    d.forward = fftw_plan_dft_1d(n, tmp.p, tmp.p, FFTW_FORWARD, FFTW_ESTIMATE);
    d.backward = fftw_plan_dft_1d(n, tmp.p, tmp.p, FFTW_BACKWARD, FFTW_ESTIMATE);
    it = cache.emplace(n, d).first;
  }
  return it->second;
}

}  // namespace

State solve_central_periodic(double kappa, const State& rhs) {
  const int n = static_cast<int>(rhs.size());
  const Dft1d& dft = dft_for(n);
  FftBuf1d buf(n);
  for (int j = 0; j < n; ++j) {
    buf.p[j][0] = rhs[static_cast<std::size_t>(j)];
    buf.p[j][1] = 0.0;
  }
  fftw_execute_dft(dft.forward, buf.p, buf.p);
  const double two_pi = 2.0 * std::acos(-1.0);
  for (int k = 0; k < n; ++k) {
    const std::complex<double> symbol(1.0, kappa * std::sin(two_pi * k / n));
    const std::complex<double> v(buf.p[k][0], buf.p[k][1]);
    const std::complex<double> s = v / symbol;
    buf.p[k][0] = s.real();
    buf.p[k][1] = s.imag();
  }
  fftw_execute_dft(dft.backward, buf.p, buf.p);
  State x(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = buf.p[j][0] / n;
  return x;
}

SemiDiscreteProblem make_scalar_problem(const ScalarProblemSpec& spec, SpaceOp explicit_part,
                                        SpaceOp implicit_part) {
  spec.validate();
  const double dx = spec.dx();
  const double slow = spec.c_m;
  const double fast = spec.c_a / spec.epsilon;

  SemiDiscreteProblem p;
  p.state_dim = static_cast<std::size_t>(spec.n);

  switch (explicit_part) {
    case SpaceOp::upwind1:
      p.explicit_op = [slow, dx](const State& w, double) { return upwind_op(w, slow, dx); };
      break;
    case SpaceOp::central2:
      p.explicit_op = [slow, dx](const State& w, double) { return central_op(w, slow, dx); };
      break;
    case SpaceOp::parabolic3:
      p.explicit_op = [slow, dx](const State& w, double) { return parabolic3_op(w, slow, dx); };
      break;
    case SpaceOp::limited3:
      p.explicit_op = [slow, dx](const State& w, double) { return limited3_op(w, slow, dx); };
      break;
  }

  switch (implicit_part) {
    case SpaceOp::upwind1:
      p.implicit_op = [fast, dx](const State& w, double) { return upwind_op(w, fast, dx); };
      p.implicit_solve = [fast, dx](double nu, const State& rhs, double) {
        return solve_upwind_periodic(nu * fast / dx, rhs);
      };
      break;
    case SpaceOp::central2:
      p.implicit_op = [fast, dx](const State& w, double) { return central_op(w, fast, dx); };
      p.implicit_solve = [fast, dx](double nu, const State& rhs, double) {
        return solve_central_periodic(nu * fast / dx, rhs);
      };
      break;
    default:
      throw std::invalid_argument("make_scalar_problem: implicit part must be upwind1 or central2");
  }
  return p;
}

double exact_smooth(const ScalarProblemSpec& spec, double t, double x) {
  const double two_pi = 2.0 * std::acos(-1.0);
  const double v = spec.transport_speed();
  return 1.0 + 0.5 * spec.epsilon * (1.0 + std::sin(two_pi * spec.epsilon * (x - v * t)));
}

double exact_discontinuous(const ScalarProblemSpec& spec, double t, double x) {
  const double v = spec.transport_speed();
  double s = (x - v * t) / v;
  s -= std::floor(s);
  return (s > 0.25 && s < 0.75) ? 1.0 + spec.epsilon : 1.0;
}

namespace {

template <typename F>
State sample_centers(const ScalarProblemSpec& spec, F&& f) {
  spec.validate();
  const double dx = spec.dx();
  State w(static_cast<std::size_t>(spec.n));
  for (int j = 0; j < spec.n; ++j) w[static_cast<std::size_t>(j)] = f((j + 0.5) * dx);
  return w;
}

}  // namespace

State sample_smooth(const ScalarProblemSpec& spec, double t) {
  return sample_centers(spec, [&](double x) { return exact_smooth(spec, t, x); });
}

State sample_discontinuous(const ScalarProblemSpec& spec, double t) {
  return sample_centers(spec, [&](double x) { return exact_discontinuous(spec, t, x); });
}

}  // namespace tvdmood
