// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "tvdmood/euler.hpp"

#include <fftw3.h>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tvdmood/advection.hpp"
#include "tvdmood/certify.hpp"
#include "tvdmood/metrics.hpp"
#include "tvdmood/tableau.hpp"

namespace tvdmood {

namespace {

constexpr double kSolveTol = 1e-10;

int fold(int k, int n, EulerBc bc) {
  if (bc == EulerBc::periodic) {
    k %= n;
    return k < 0 ? k + n : k;
  }
  return std::clamp(k, 0, n - 1);
}

// One sweep direction: n cells of size d along the axis, `lines` parallel
// lines, `stride` between axis neighbours, `lstride` between lines.
struct AxisView {
  int n;
  int lines;
  int stride;
  int lstride;
  double d;
};

AxisView axis_view(const EulerGrid& g, int axis) {
  if (axis == 0) return {g.nx, g.ny, 1, g.nx, g.dx};
  return {g.ny, g.nx, g.nx, 1, g.dy};
}

// Convective face fluxes along one axis: interface states from the requested
// componentwise reconstruction, a local Lax-Friedrichs flux for
// f = (0, m_n u_n, m_t u_n) at the material speed |u_n|.
void add_convective_axis(const EulerGrid& g, EulerRecon recon, int axis, const State& w,
                         State& t) {
  const AxisView av = axis_view(g, axis);
  const int nc = g.cells();
  const int pn = 1 + axis;
  const int pt = 2 - axis;
  const bool periodic = g.bc == EulerBc::periodic;
  const int n = av.n;
  // Neumann lines carry two ghost copies per side so that every face sees a
  // full reconstruction stencil; the wrapped values reconstruct3 produces in
  // the outermost ghost cells are never read.
  const int pad = periodic ? 0 : 2;
  const int pl = n + 2 * pad;
  State lr(pl), ln(pl), lt(pl);
  const int nf = periodic ? n : n + 1;
  std::vector<double> fr(nf), fn(nf), ft(nf);
  for (int line = 0; line < av.lines; ++line) {
    const int base = line * av.lstride;
    for (int k = 0; k < pl; ++k) {
      const int cell = base + fold(k - pad, n, g.bc) * av.stride;
      lr[k] = w[cell];
      ln[k] = w[pn * nc + cell];
      lt[k] = w[pt * nc + cell];
    }
    Reconstruction rr, rn, rt;
    if (recon == EulerRecon::constant) {
      rr = {lr, lr};
      rn = {ln, ln};
      rt = {lt, lt};
    } else {
      const bool limited = recon == EulerRecon::limited;
      rr = reconstruct3(lr, limited);
      rn = reconstruct3(ln, limited);
      rt = reconstruct3(lt, limited);
    }
    for (int f = 0; f < nf; ++f) {
      const int kl = periodic ? f : pad - 1 + f;
      const int kr = periodic ? (f + 1) % n : pad + f;
      const double rl = rr.plus[kl];
      const double rhs_rho = rr.minus[kr];
      if (!(rl > 0.0) || !(rhs_rho > 0.0)) {
        throw StepFailure("non-positive interface density");
      }
      const double mnl = rn.plus[kl];
      const double mnr = rn.minus[kr];
      const double mtl = rt.plus[kl];
      const double mtr = rt.minus[kr];
      const double ul = mnl / rl;
      const double ur = mnr / rhs_rho;
      const double a = std::max(std::abs(ul), std::abs(ur));
      fr[f] = -0.5 * a * (rhs_rho - rl);
      fn[f] = 0.5 * (mnl * ul + mnr * ur) - 0.5 * a * (mnr - mnl);
      ft[f] = 0.5 * (mtl * ul + mtr * ur) - 0.5 * a * (mtr - mtl);
    }
    for (int i = 0; i < n; ++i) {
      const int cell = base + i * av.stride;
      const int fl = periodic ? (i + n - 1) % n : i;
      const int fright = periodic ? i : i + 1;
      t[cell] -= (fr[fright] - fr[fl]) / av.d;
      t[pn * nc + cell] -= (fn[fright] - fn[fl]) / av.d;
      t[pt * nc + cell] -= (ft[fright] - ft[fl]) / av.d;
    }
  }
}

// Central first-difference stencil (offset, coefficient) pairs, scaled 1/d.
std::vector<std::pair<int, double>> central_stencil(int order, double d) {
  if (order == 2) return {{1, 1.0 / (2.0 * d)}, {-1, -1.0 / (2.0 * d)}};
  return {{2, -1.0 / (12.0 * d)},
          {1, 8.0 / (12.0 * d)},
          {-1, -8.0 / (12.0 * d)},
          {-2, 1.0 / (12.0 * d)}};
}

// Central difference of the pressure remainder into the normal momentum, at
// the same stencil order as the implicit flux.
void add_remainder_axis(const EulerGrid& g, int axis, int order, const State& dp, State& t) {
  const AxisView av = axis_view(g, axis);
  const int nc = g.cells();
  const int pn = 1 + axis;
  const auto stencil = central_stencil(order, av.d);
  for (int line = 0; line < av.lines; ++line) {
    const int base = line * av.lstride;
    for (int i = 0; i < av.n; ++i) {
      double grad = 0.0;
      for (const auto& [off, coef] : stencil) {
        grad += coef * dp[base + fold(i + off, av.n, g.bc) * av.stride];
      }
      t[pn * nc + base + i * av.stride] -= grad;
    }
  }
}

// Linear implicit tendency: central differences of (m, kappa rho I) plus an
// optional Rusanov second difference at speed `diss` on every component.
State implicit_tendency(const EulerGrid& g, double kappa, int order, double diss,
                        const State& w) {
  const int nc = g.cells();
  State t(3 * nc, 0.0);
  for (int axis = 0; axis < 2; ++axis) {
    const AxisView av = axis_view(g, axis);
    const int pn = 1 + axis;
    const auto stencil = central_stencil(order, av.d);
    const double q = diss / (2.0 * av.d);
    for (int line = 0; line < av.lines; ++line) {
      const int base = line * av.lstride;
      for (int i = 0; i < av.n; ++i) {
        const int cell = base + i * av.stride;
        double drho = 0.0;
        double dmn = 0.0;
        for (const auto& [off, coef] : stencil) {
          const int nb = base + fold(i + off, av.n, g.bc) * av.stride;
          drho += coef * w[nb];
          dmn += coef * w[pn * nc + nb];
        }
        t[cell] -= dmn;
        t[pn * nc + cell] -= kappa * drho;
        if (diss > 0.0) {
          const int ip = base + fold(i + 1, av.n, g.bc) * av.stride;
          const int im = base + fold(i - 1, av.n, g.bc) * av.stride;
          for (int p = 0; p < 3; ++p) {
            t[p * nc + cell] +=
                q * (w[p * nc + ip] - 2.0 * w[p * nc + cell] + w[p * nc + im]);
          }
        }
      }
    }
  }
  return t;
}

struct FftwBuffer {
  fftw_complex* p = nullptr;
  explicit FftwBuffer(int n) : p(fftw_alloc_complex(static_cast<std::size_t>(n))) {
    if (p == nullptr) throw std::bad_alloc();
  }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  ~FftwBuffer() { fftw_free(p); }
};

struct Dft2d {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// Plan creation is not thread safe; execution via the new-array interface on
// fftw_malloc'ed buffers is.
const Dft2d& dft2_for(int nx, int ny) {
  static std::mutex mtx;
  static std::map<std::pair<int, int>, Dft2d> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find({nx, ny});
  if (it == cache.end()) {
    FftwBuffer tmp(nx * ny);
    Dft2d d;
    d.fwd = fftw_plan_dft_2d(ny, nx, tmp.p, tmp.p, FFTW_FORWARD, FFTW_ESTIMATE);
    d.bwd = fftw_plan_dft_2d(ny, nx, tmp.p, tmp.p, FFTW_BACKWARD, FFTW_ESTIMATE);
    it = cache.emplace(std::make_pair(nx, ny), d).first;
  }
  return it->second;
}

// Periodic solve of (I - nu L) w = b by eliminating the momentum modes into a
// scalar Helmholtz relation per Fourier mode and back-substituting.
State solve_periodic(const EulerGrid& g, double kappa, int order, double diss, double nu,
                     const State& b) {
  const int nc = g.cells();
  const Dft2d& plans = dft2_for(g.nx, g.ny);
  FftwBuffer br(nc), bx(nc), by(nc);
  for (int c = 0; c < nc; ++c) {
    br.p[c][0] = b[c];
    br.p[c][1] = 0.0;
    bx.p[c][0] = b[nc + c];
    bx.p[c][1] = 0.0;
    by.p[c][0] = b[2 * nc + c];
    by.p[c][1] = 0.0;
  }
  fftw_execute_dft(plans.fwd, br.p, br.p);
  fftw_execute_dft(plans.fwd, bx.p, bx.p);
  fftw_execute_dft(plans.fwd, by.p, by.p);
  const double two_pi = 2.0 * std::acos(-1.0);
  for (int ky = 0; ky < g.ny; ++ky) {
    const double phi = two_pi * ky / g.ny;
    for (int kx = 0; kx < g.nx; ++kx) {
      const double theta = two_pi * kx / g.nx;
      const double sx = order == 2 ? std::sin(theta) / g.dx
                                   : (8.0 * std::sin(theta) - std::sin(2.0 * theta)) /
                                         (6.0 * g.dx);
      const double sy = order == 2 ? std::sin(phi) / g.dy
                                   : (8.0 * std::sin(phi) - std::sin(2.0 * phi)) /
                                         (6.0 * g.dy);
      const double khat =
          diss * ((std::cos(theta) - 1.0) / g.dx + (std::cos(phi) - 1.0) / g.dy);
      const double a = 1.0 - nu * khat;
      const double denom = a * a + nu * nu * kappa * (sx * sx + sy * sy);
      const int c = ky * g.nx + kx;
      const std::complex<double> cr(br.p[c][0], br.p[c][1]);
      const std::complex<double> cx(bx.p[c][0], bx.p[c][1]);
      const std::complex<double> cy(by.p[c][0], by.p[c][1]);
      const std::complex<double> i_sigma_dot_m(0.0, 1.0);
      const std::complex<double> rho_hat =
          (a * cr - nu * i_sigma_dot_m * (sx * cx + sy * cy)) / denom;
      const std::complex<double> mx_hat =
          (cx - nu * kappa * i_sigma_dot_m * sx * rho_hat) / a;
      const std::complex<double> my_hat =
          (cy - nu * kappa * i_sigma_dot_m * sy * rho_hat) / a;
      br.p[c][0] = rho_hat.real();
      br.p[c][1] = rho_hat.imag();
      bx.p[c][0] = mx_hat.real();
      bx.p[c][1] = mx_hat.imag();
      by.p[c][0] = my_hat.real();
      by.p[c][1] = my_hat.imag();
    }
  }
  fftw_execute_dft(plans.bwd, br.p, br.p);
  fftw_execute_dft(plans.bwd, bx.p, bx.p);
  fftw_execute_dft(plans.bwd, by.p, by.p);
  State x(3 * nc);
  const double scale = 1.0 / nc;
  for (int c = 0; c < nc; ++c) {
    x[c] = br.p[c][0] * scale;
    x[nc + c] = bx.p[c][0] * scale;
    x[2 * nc + c] = by.p[c][0] * scale;
  }
  return x;
}

using SpMat = Eigen::SparseMatrix<double>;
using SpLu = Eigen::SparseLU<SpMat>;

struct NeumannSolver {
  SpMat op;  // implicit tendency matrix including the ghost-cell folding
  std::map<double, std::shared_ptr<SpLu>> lu;
  std::mutex mtx;
  bool assembled = false;
};

// The sparse rows replicate implicit_tendency exactly: ghost-cell copies fold
// stencil legs onto the boundary cell, which setFromTriplets sums.
void assemble_neumann(const EulerGrid& g, double kappa, int order, double diss,
                      NeumannSolver& solver) {
  const int nc = g.cells();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(nc) * 24);
  for (int axis = 0; axis < 2; ++axis) {
    const AxisView av = axis_view(g, axis);
    const int pn = 1 + axis;
    const auto stencil = central_stencil(order, av.d);
    const double q = diss / (2.0 * av.d);
    for (int line = 0; line < av.lines; ++line) {
      const int base = line * av.lstride;
      for (int i = 0; i < av.n; ++i) {
        const int cell = base + i * av.stride;
        for (const auto& [off, coef] : stencil) {
          const int nb = base + fold(i + off, av.n, g.bc) * av.stride;
          trips.emplace_back(cell, pn * nc + nb, -coef);
          trips.emplace_back(pn * nc + cell, nb, -kappa * coef);
        }
        if (diss > 0.0) {
          const int ip = base + fold(i + 1, av.n, g.bc) * av.stride;
          const int im = base + fold(i - 1, av.n, g.bc) * av.stride;
          for (int p = 0; p < 3; ++p) {
            trips.emplace_back(p * nc + cell, p * nc + ip, q);
            trips.emplace_back(p * nc + cell, p * nc + cell, -2.0 * q);
            trips.emplace_back(p * nc + cell, p * nc + im, q);
          }
        }
      }
    }
  }
  solver.op.resize(3 * nc, 3 * nc);
  solver.op.setFromTriplets(trips.begin(), trips.end());
  solver.assembled = true;
}

double inf_norm(const State& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(const State& a, const State& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Matrix-free BiCGStab with relative Euclidean residual `tol`.
State bicgstab(const std::function<State(const State&)>& apply, const State& b, double tol) {
  const std::size_t n = b.size();
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) return State(n, 0.0);
  State x = b;
  State r = apply(x);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - r[k];
  State r0 = r;
  State p = r;
  double rho_old = dot(r0, r);
  const int maxit = 1000 + static_cast<int>(10 * std::sqrt(static_cast<double>(n)));
  for (int it = 0; it < maxit; ++it) {
    if (std::sqrt(dot(r, r)) <= tol * bnorm) return x;
    State v = apply(p);
    const double alpha_den = dot(r0, v);
    if (alpha_den == 0.0) throw StepFailure("implicit solver breakdown");
    const double alpha = rho_old / alpha_den;
    State s = r;
    for (std::size_t k = 0; k < n; ++k) s[k] -= alpha * v[k];
    if (std::sqrt(dot(s, s)) <= tol * bnorm) {
      for (std::size_t k = 0; k < n; ++k) x[k] += alpha * p[k];
      return x;
    }
    State t = apply(s);
    const double tt = dot(t, t);
    if (tt == 0.0) throw StepFailure("implicit solver breakdown");
    const double omega = dot(t, s) / tt;
    if (omega == 0.0) throw StepFailure("implicit solver breakdown");
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k] + omega * s[k];
      r[k] = s[k] - omega * t[k];
    }
    const double rho_new = dot(r0, r);
    if (rho_new == 0.0) throw StepFailure("implicit solver breakdown");
    const double beta = (rho_new / rho_old) * (alpha / omega);
    for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
    rho_old = rho_new;
  }
  throw StepFailure("implicit solver did not converge");
}

State solve_neumann(const EulerGrid& g, double kappa, int order, double diss, double nu,
                    const State& b, int direct_cell_cap,
                    const std::shared_ptr<NeumannSolver>& solver) {
  const int nc = g.cells();
  if (nc > direct_cell_cap) {
    auto apply = [&](const State& v) {
      State lv = implicit_tendency(g, kappa, order, diss, v);
      State out(v.size());
      for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k] - nu * lv[k];
      return out;
    };
    return bicgstab(apply, b, kSolveTol);
  }
  std::shared_ptr<SpLu> lu;
  {
    std::lock_guard<std::mutex> lock(solver->mtx);
    if (!solver->assembled) assemble_neumann(g, kappa, order, diss, *solver);
    auto it = solver->lu.find(nu);
    if (it == solver->lu.end()) {
      SpMat id(3 * nc, 3 * nc);
      id.setIdentity();
      SpMat m = id - nu * solver->op;
      auto fact = std::make_shared<SpLu>();
      fact->compute(m);
      if (fact->info() != Eigen::Success) {
        throw StepFailure("implicit factorization failed");
      }
      it = solver->lu.emplace(nu, std::move(fact)).first;
    }
    lu = it->second;
  }
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
  Eigen::VectorXd xv = lu->solve(bv);
  State x(b.size());
  Eigen::Map<Eigen::VectorXd>(x.data(), xv.size()) = xv;
  State lx = implicit_tendency(g, kappa, order, diss, x);
  double res = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    res = std::max(res, std::abs(x[k] - nu * lx[k] - b[k]));
  }
  if (res > kSolveTol * std::max(1.0, inf_norm(b))) {
    throw StepFailure("implicit solve residual too large");
  }
  return x;
}

SemiDiscreteProblem make_problem(const EulerGrid& grid, const EulerParams& params,
                                 EulerRecon recon, int order, double diss,
                                 int direct_cell_cap) {
  grid.validate();
  params.validate();
  if (order != 2 && order != 4) {
    throw std::invalid_argument("implicit stencil order must be 2 or 4");
  }
  if (recon != EulerRecon::constant && grid.bc == EulerBc::periodic &&
      (grid.nx < 5 || grid.ny < 5)) {
    throw std::invalid_argument("reconstruction needs at least 5 cells per periodic axis");
  }
  const double kappa = params.c_ref_sq() / (params.mach * params.mach);
  const double m2 = params.mach * params.mach;
  const double c2 = params.c_ref_sq();
  const double gamma = params.gamma_gas;
  auto neumann = std::make_shared<NeumannSolver>();
  SemiDiscreteProblem p;
  p.state_dim = static_cast<std::size_t>(3 * grid.cells());
  p.explicit_op = [grid, recon, order, c2, m2, gamma](const State& w, double) {
    const int nc = grid.cells();
    State t(3 * nc, 0.0);
    State dp(nc);
    for (int c = 0; c < nc; ++c) {
      dp[c] = (std::pow(w[c], gamma) - c2 * w[c]) / m2;
    }
    for (int axis = 0; axis < 2; ++axis) {
      add_convective_axis(grid, recon, axis, w, t);
      add_remainder_axis(grid, axis, order, dp, t);
    }
    return t;
  };
  p.implicit_op = [grid, kappa, order, diss](const State& w, double) {
    return implicit_tendency(grid, kappa, order, diss, w);
  };
  p.implicit_solve = [grid, kappa, order, diss, direct_cell_cap, neumann](
                         double nu, const State& rhs, double) {
    if (nu == 0.0) return rhs;
    if (grid.bc == EulerBc::periodic) {
      return solve_periodic(grid, kappa, order, diss, nu, rhs);
    }
    return solve_neumann(grid, kappa, order, diss, nu, rhs, direct_cell_cap, neumann);
  };
  return p;
}

std::vector<double> plain_theta(const ImexTableau& tab) {
  // theta has length s for stiffly accurate pairs and s+1 otherwise.
  return std::vector<double>(tab.stiffly_accurate() ? tab.s : tab.s + 1, 1.0);
}

}  // namespace

EulerCase euler_case_from_string(const std::string& name) {
  if (name == "acoustic_rp") return EulerCase::acoustic_rp;
  if (name == "shear_wave") return EulerCase::shear_wave;
  if (name == "explosion") return EulerCase::explosion;
  if (name == "double_shear") return EulerCase::double_shear;
  if (name == "vortex") return EulerCase::vortex;
  throw std::invalid_argument(
      "unknown case '" + name +
      "' (expected acoustic_rp, shear_wave, explosion, double_shear, or vortex)");
}

void EulerGrid::validate() const {
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid needs at least one cell per axis");
  if (!(dx > 0.0) || !(dy > 0.0)) throw std::invalid_argument("cell sizes must be positive");
}

double EulerParams::c_ref_sq() const { return gamma_gas * std::pow(rho_ref, gamma_gas - 1.0); }

void EulerParams::validate() const {
  if (!(mach > 0.0)) throw std::invalid_argument("Mach number must be positive");
  if (!(gamma_gas >= 1.0)) throw std::invalid_argument("gamma must be at least 1");
  if (!(rho_ref > 0.0)) throw std::invalid_argument("reference density must be positive");
}

double pressure(double rho, double gamma_gas) { return std::pow(rho, gamma_gas); }

double sound_speed(double rho, double gamma_gas) {
  return std::sqrt(gamma_gas * std::pow(rho, gamma_gas - 1.0));
}

void EulerState2D::validate() const {
  grid.validate();
  const std::size_t expect = static_cast<std::size_t>(3 * grid.cells());
  if (w.size() != expect) throw std::invalid_argument("state size does not match the grid");
  const int nc = grid.cells();
  for (int c = 0; c < nc; ++c) {
    if (!(w[c] > 0.0)) throw std::invalid_argument("density must be positive");
  }
  for (double v : w) {
    if (!std::isfinite(v)) throw std::invalid_argument("state must be finite");
  }
}

SemiDiscreteProblem rs_imex_operators(const EulerGrid& grid, const EulerParams& params,
                                      EulerRecon recon, int implicit_order,
                                      int direct_cell_cap) {
  return make_problem(grid, params, recon, implicit_order, 0.0, direct_cell_cap);
}

SemiDiscreteProblem upwind_tvd_operators(const EulerGrid& grid, const EulerParams& params,
                                         EulerRecon recon, int direct_cell_cap) {
  const double diss = std::sqrt(params.c_ref_sq()) / params.mach;
  return make_problem(grid, params, recon, 2, diss, direct_cell_cap);
}

State riemann_invariant_detector(const EulerGrid& grid, const EulerParams& params,
                                 const State& w) {
  params.validate();
  if (!(params.gamma_gas > 1.0)) {
    throw std::domain_error("Riemann invariants need gamma > 1");
  }
  const int nc = grid.cells();
  if (w.size() != static_cast<std::size_t>(3 * nc)) {
    throw std::invalid_argument("state size does not match the grid");
  }
  State phi(nc);
  const double acoustic_scale = 2.0 / ((params.gamma_gas - 1.0) * params.mach);
  for (int c = 0; c < nc; ++c) {
    const double rho = w[c];
    if (!(rho > 0.0)) throw std::domain_error("non-positive density in detector");
    const double ux = w[nc + c] / rho;
    const double uy = w[2 * nc + c] / rho;
    const double x = acoustic_scale * sound_speed(rho, params.gamma_gas);
    double val = -std::numeric_limits<double>::infinity();
    for (double un : {ux, uy}) {
      val = std::max(val, std::max(un + x, un - x));
    }
    phi[c] = val;
  }
  return phi;
}

double riemann_invariant_sup(const EulerGrid& grid, const EulerParams& params,
                             const State& w) {
  const State phi = riemann_invariant_detector(grid, params, w);
  double s = -std::numeric_limits<double>::infinity();
  for (double v : phi) s = std::max(s, v);
  return s;
}

EulerState2D init_case(EulerCase which, const EulerParams& params, int nx, int ny) {
  params.validate();
  if (nx < 1 || ny < 1) throw std::invalid_argument("grid needs at least one cell per axis");
  const double pi = std::acos(-1.0);
  EulerState2D s;
  EulerGrid& g = s.grid;
  g.nx = nx;
  g.ny = ny;
  switch (which) {
    case EulerCase::acoustic_rp:
    case EulerCase::shear_wave:
      g.x0 = 0.0;
      g.y0 = 0.0;
      g.dx = 2.0 / nx;
      g.dy = 1.0 / ny;
      g.bc = EulerBc::neumann;
      break;
    case EulerCase::explosion:
      g.x0 = -0.5;
      g.y0 = -0.5;
      g.dx = 1.0 / nx;
      g.dy = 1.0 / ny;
      g.bc = EulerBc::periodic;
      break;
    case EulerCase::double_shear:
      g.x0 = 0.0;
      g.y0 = 0.0;
      g.dx = 2.0 * pi / nx;
      g.dy = 2.0 * pi / ny;
      g.bc = EulerBc::periodic;
      break;
    case EulerCase::vortex:
      g.x0 = 0.0;
      g.y0 = 0.0;
      g.dx = 1.0 / nx;
      g.dy = 1.0 / ny;
      g.bc = EulerBc::periodic;
      break;
  }
  const int nc = g.cells();
  s.w.assign(static_cast<std::size_t>(3 * nc), 0.0);
  const double m2 = params.mach * params.mach;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double x = g.cell_x(i);
      const double y = g.cell_y(j);
      double rho = 1.0;
      double ux = 0.0;
      double uy = 0.0;
      switch (which) {
        case EulerCase::acoustic_rp:
          rho = x < 1.0 ? 1.0 + m2 : 1.0;
          break;
        case EulerCase::shear_wave:
          rho = x < 1.0 ? 1.0 + m2 : 1.0;
          uy = x < 1.0 ? 1.0 + params.mach : 1.0;
          break;
        case EulerCase::explosion:
          rho = x * x + y * y < 0.2 * 0.2 ? 2.0 : 1.0;
          break;
        case EulerCase::double_shear: {
          rho = pi / 15.0;
          ux = y <= pi ? std::tanh((y - pi / 2.0) / rho)
                       : std::tanh((3.0 * pi / 2.0 - y) / rho);
          uy = 0.05 * std::sin(x);
          break;
        }
        case EulerCase::vortex: {
          const double a = 8.0;
          const double xc = x - 0.5;
          const double yc = y - 0.5;
          const double r2 = xc * xc + yc * yc;
          rho = 1.0 - m2 / 8.0 * std::exp(-2.0 * a * a * r2);
          const double swirl = a * std::sqrt(params.gamma_gas / 2.0) *
                               std::exp(-a * a * r2) *
                               std::pow(rho, params.gamma_gas / 2.0 - 1.0);
          ux = swirl * yc;
          uy = -swirl * xc;
          break;
        }
      }
      const int c = g.cell(i, j);
      s.w[c] = rho;
      s.w[nc + c] = rho * ux;
      s.w[2 * nc + c] = rho * uy;
    }
  }
  return s;
}

State vorticity(const EulerGrid& grid, const State& w) {
  const int nc = grid.cells();
  if (w.size() != static_cast<std::size_t>(3 * nc)) {
    throw std::invalid_argument("state size does not match the grid");
  }
  State ux(nc), uy(nc);
  for (int c = 0; c < nc; ++c) {
    ux[c] = w[nc + c] / w[c];
    uy[c] = w[2 * nc + c] / w[c];
  }
  State omega(nc);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const int ip = grid.cell(fold(i + 1, grid.nx, grid.bc), j);
      const int im = grid.cell(fold(i - 1, grid.nx, grid.bc), j);
      const int jp = grid.cell(i, fold(j + 1, grid.ny, grid.bc));
      const int jm = grid.cell(i, fold(j - 1, grid.ny, grid.bc));
      omega[grid.cell(i, j)] =
          (uy[ip] - uy[im]) / (2.0 * grid.dx) - (ux[jp] - ux[jm]) / (2.0 * grid.dy);
    }
  }
  return omega;
}

double mean_density(const EulerState2D& state) {
  const int nc = state.grid.cells();
  double s = 0.0;
  for (int c = 0; c < nc; ++c) s += state.w[c];
  return s / nc;
}

State momentum_norm(const EulerGrid& grid, const State& w) {
  const int nc = grid.cells();
  State m(nc);
  for (int c = 0; c < nc; ++c) {
    m[c] = std::hypot(w[nc + c], w[2 * nc + c]);
  }
  return m;
}

State pressure_remainder(const EulerGrid& grid, const EulerParams& params, const State& w) {
  params.validate();
  const int nc = grid.cells();
  const double c2 = params.c_ref_sq();
  const double m2 = params.mach * params.mach;
  State dp(nc);
  for (int c = 0; c < nc; ++c) {
    dp[c] = (std::pow(w[c], params.gamma_gas) - c2 * w[c]) / m2;
  }
  return dp;
}

namespace {

// Per-axis maxima of |u . n|, optionally shifted by c/M per cell.
std::pair<double, double> axis_speed_maxima(const EulerGrid& grid, const EulerParams* params,
                                            const State& w) {
  const int nc = grid.cells();
  double sx = 0.0;
  double sy = 0.0;
  for (int c = 0; c < nc; ++c) {
    const double rho = w[c];
    if (!(rho > 0.0)) throw std::domain_error("non-positive density");
    const double shift =
        params == nullptr ? 0.0 : sound_speed(rho, params->gamma_gas) / params->mach;
    sx = std::max(sx, std::abs(w[nc + c] / rho) + shift);
    sy = std::max(sy, std::abs(w[2 * nc + c] / rho) + shift);
  }
  return {sx, sy};
}

double axes_dt(const EulerGrid& grid, std::pair<double, double> speeds, double nu) {
  const double inf = std::numeric_limits<double>::infinity();
  const double dtx = speeds.first > 0.0 ? nu * grid.dx / (2.0 * speeds.first) : inf;
  const double dty = speeds.second > 0.0 ? nu * grid.dy / (2.0 * speeds.second) : inf;
  return std::min(dtx, dty);
}

}  // namespace

double max_material_speed(const EulerGrid& grid, const State& w) {
  const auto [sx, sy] = axis_speed_maxima(grid, nullptr, w);
  return std::max(sx, sy);
}

double max_wave_speed(const EulerGrid& grid, const EulerParams& params, const State& w) {
  const auto [sx, sy] = axis_speed_maxima(grid, &params, w);
  return std::max(sx, sy);
}

double material_dt(const EulerGrid& grid, const EulerParams& params, const State& w,
                   double nu) {
  params.validate();
  return axes_dt(grid, axis_speed_maxima(grid, nullptr, w), nu);
}

double acoustic_dt(const EulerGrid& grid, const EulerParams& params, const State& w,
                   double nu) {
  params.validate();
  return axes_dt(grid, axis_speed_maxima(grid, &params, w), nu);
}

MoodHierarchy euler_mood_hierarchy(const EulerGrid& grid, const EulerParams& params,
                                   const State& w0, int implicit_order) {
  MoodHierarchy h;
  const ImexTableau tab = make_tvd3_4();
  ConvexScheme imex3{tab, plain_theta(tab), std::nullopt};
  h.levels.push_back({rs_imex_operators(grid, params, EulerRecon::parabola, implicit_order),
                      imex3, "imex3_rs"});
  h.levels.push_back({rs_imex_operators(grid, params, EulerRecon::limited, implicit_order),
                      make_tvd3_4_scheme(), "tvd3_rs"});
  h.levels.push_back(
      {upwind_tvd_operators(grid, params), make_tvd3_4_scheme(), "tvd3_upwind"});
  h.detector_sup = [grid, params](const State& w) {
    return riemann_invariant_sup(grid, params, w);
  };
  h.xi = 0.01;
  h.time_dependent = true;
  h.dmp_slack = params.mach * max_material_speed(grid, w0);
  h.validate();
  return h;
}

void write_snapshot_csv(const std::string& path, const EulerGrid& grid, const State& w) {
  const int nc = grid.cells();
  if (w.size() != static_cast<std::size_t>(3 * nc)) {
    throw std::invalid_argument("state size does not match the grid");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const State omega = vorticity(grid, w);
  out << "x,y,rho,mom_x,mom_y,omega\n";
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const int c = grid.cell(i, j);
      out << format_sig(grid.cell_x(i)) << ',' << format_sig(grid.cell_y(j)) << ','
          << format_sig(w[c]) << ',' << format_sig(w[nc + c]) << ','
          << format_sig(w[2 * nc + c]) << ',' << format_sig(omega[c]) << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void write_snapshot_binary(const std::string& path, const EulerGrid& grid,
                           const EulerParams& params, const State& w, double t,
                           EulerCase which) {
  const int nc = grid.cells();
  if (w.size() != static_cast<std::size_t>(3 * nc)) {
    throw std::invalid_argument("state size does not match the grid");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const double header[8] = {static_cast<double>(grid.nx), static_cast<double>(grid.ny),
                            grid.dx,
                            grid.dy,
                            t,
                            params.mach,
                            params.gamma_gas,
                            static_cast<double>(static_cast<std::int32_t>(which))};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(w.data()),
            static_cast<std::streamsize>(w.size() * sizeof(double)));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

EulerSnapshot read_snapshot_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  double header[8] = {};
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in) throw std::runtime_error("truncated snapshot header in '" + path + "'");
  EulerSnapshot snap;
  snap.grid.nx = static_cast<int>(header[0]);
  snap.grid.ny = static_cast<int>(header[1]);
  snap.grid.dx = header[2];
  snap.grid.dy = header[3];
  snap.t = header[4];
  snap.params.mach = header[5];
  snap.params.gamma_gas = header[6];
  snap.which = static_cast<EulerCase>(static_cast<std::int32_t>(header[7]));
  snap.grid.validate();
  snap.w.resize(static_cast<std::size_t>(3 * snap.grid.cells()));
  in.read(reinterpret_cast<char*>(snap.w.data()),
          static_cast<std::streamsize>(snap.w.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated snapshot data in '" + path + "'");
  return snap;
}

}  // namespace tvdmood
