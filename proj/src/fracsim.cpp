#include "fomas/fracsim.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace fomas {
namespace fracsim {

const char* SchemeName(Scheme s) {
  return s == Scheme::kGrunwaldLetnikov ? "grunwald-letnikov" : "predictor-corrector";
}

Scheme ParseScheme(const std::string& name) {
  if (name == "grunwald-letnikov" || name == "gl") return Scheme::kGrunwaldLetnikov;
  if (name == "predictor-corrector" || name == "abm") return Scheme::kPredictorCorrector;
  throw std::invalid_argument("unknown integration scheme '" + name + "'");
}

int SimConfig::steps() const { return static_cast<int>(std::llround(t_end / dt)) + 1; }

void SimConfig::Validate() const {
  if (!(dt > 0.0) || !(dt <= t_end) || !std::isfinite(t_end)) {
    throw std::invalid_argument("SimConfig: need 0 < dt <= t_end");
  }
  if (memory && *memory < 1) throw std::invalid_argument("SimConfig: memory length must be >= 1");
}

Vector Trajectory::AgentState(int step, int agent) const {
  return x.row(step).segment(agent * n, n).transpose();
}

std::vector<double> GlWeights(double q, int count) {
  std::vector<double> w(std::max(count, 0));
  if (count > 0) w[0] = 1.0;
  for (int j = 1; j < count; ++j) w[j] = w[j - 1] * (1.0 - (q + 1.0) / j);
  return w;
}

namespace {

// Explicit part g(z, t) of D^q z = M z + g(z, t).
using Explicit = std::function<Vector(const Vector& z, double t)>;

// Growth beyond this multiple of the initial state counts as divergence.
constexpr double kBlowUp = 1e10;

void CheckStep(const Vector& z0, const Vector& prev, const Vector& next, int k) {
  if (!next.allFinite()) {
    throw DivergenceError("simulation produced a non-finite state at step " + std::to_string(k), k);
  }
  if (next.norm() > 1e6 * std::max(1.0, prev.norm())) {
    throw DivergenceError("state grew by more than 1e6 in one step at step " + std::to_string(k) +
                              "; dt is too large for this system",
                          k);
  }
  if (next.norm() > kBlowUp * std::max(1.0, z0.norm())) {
    throw DivergenceError("state norm exceeded 1e10 times the initial norm at step " + std::to_string(k), k);
  }
}

Matrix IntegrateGl(const Matrix& M, const Explicit& g, const Vector& z0, double q,
                   const SimConfig& cfg) {
  const int K = cfg.steps();
  const int dim = static_cast<int>(z0.size());
  const double hq = std::pow(cfg.dt, q);
  const std::vector<double> w = GlWeights(q, K);
  Matrix Z(dim, K);  // column-major history, one column per step
  Z.col(0) = z0;
  const Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(dim, dim) - hq * M);
  for (int k = 1; k < K; ++k) {
    const int span = cfg.memory ? std::min(k, *cfg.memory) : k;
    Vector rhs = z0;
    for (int j = 1; j <= span; ++j) rhs.noalias() -= w[j] * (Z.col(k - j) - z0);
    if (g) rhs += hq * g(Z.col(k - 1), (k - 1) * cfg.dt);
    Z.col(k) = dim > 0 ? lu.solve(rhs) : rhs;
    CheckStep(z0, Z.col(k - 1), Z.col(k), k);
  }
  return Z.transpose();
}

// Adams-Bashforth-Moulton predictor-corrector with product-trapezoid weights.
Matrix IntegrateAbm(const Matrix& M, const Explicit& g, const Vector& z0, double q,
                    const SimConfig& cfg) {
  const int K = cfg.steps();
  const int dim = static_cast<int>(z0.size());
  const double h = cfg.dt;
  const double c_pred = std::pow(h, q) / std::tgamma(q + 1.0);
  const double c_corr = std::pow(h, q) / std::tgamma(q + 2.0);
  const auto f = [&](const Vector& z, double t) -> Vector {
    Vector out = M * z;
    if (g) out += g(z, t);
    return out;
  };
  Matrix Z(dim, K), F(dim, K);
  Z.col(0) = z0;
  F.col(0) = f(z0, 0.0);
  std::vector<double> pw(K + 1), pw1(K + 1);
  for (int j = 0; j <= K; ++j) {
    pw[j] = std::pow(j, q);
    pw1[j] = std::pow(j, q + 1.0);
  }
  for (int k = 0; k + 1 < K; ++k) {
    const int first = cfg.memory ? std::max(0, k - *cfg.memory + 1) : 0;
    Vector pred = z0, corr = z0;
    for (int j = first; j <= k; ++j) {
      pred.noalias() += c_pred * (pw[k + 1 - j] - pw[k - j]) * F.col(j);
      const double a = j == 0 ? pw1[k] - (k - q) * pw[k + 1]
                              : pw1[k - j + 2] + pw1[k - j] - 2.0 * pw1[k - j + 1];
      corr.noalias() += c_corr * a * F.col(j);
    }
    corr += c_corr * f(pred, (k + 1) * h);
    Z.col(k + 1) = corr;
    CheckStep(z0, Z.col(k), corr, k + 1);
    F.col(k + 1) = f(corr, (k + 1) * h);
  }
  return Z.transpose();
}

// The implicit GL step maps a growing mode with |λ| dt^q >= 1 onto a decaying
// one, so such modes are reported instead of integrated.
void CheckResolvedGrowth(const Matrix& M, double q, double dt) {
  if (M.size() == 0) return;
  const double hq = std::pow(dt, q);
  for (const auto& lambda : linalg::Eig(M).eigenvalues) {
    const bool unstable = std::abs(std::arg(lambda)) < q * M_PI / 2.0 - 1e-9 && std::abs(lambda) > 1e-12;
    if (unstable && std::abs(lambda) * hq >= 1.0) {
      std::ostringstream os;
      os << "closed loop has an unstable mode " << lambda.real() << (lambda.imag() < 0 ? "" : "+")
         << lambda.imag() << "i that grows faster than dt resolves (|lambda| dt^q = "
         << std::abs(lambda) * hq << ")";
      throw DivergenceError(os.str(), 1);
    }
  }
}

Matrix Integrate(const Matrix& M, const Explicit& g, const Vector& z0, double q,
                 const SimConfig& cfg) {
  cfg.Validate();
  if (cfg.scheme == Scheme::kGrunwaldLetnikov) CheckResolvedGrowth(M, q, cfg.dt);
  return cfg.scheme == Scheme::kGrunwaldLetnikov ? IntegrateGl(M, g, z0, q, cfg)
                                                 : IntegrateAbm(M, g, z0, q, cfg);
}

// [[A + ΔA + B D_c L_p C, B C_c], [B_c L_p C, A_c]] on z = [x; x_c].
Matrix LoopMatrix(const plant::Augmented& aug, const Matrix& Lp,
                  const plant::StackedController& s) {
  const Eigen::Index nx = aug.A_N.rows(), nc = s.A_c.rows();
  const Matrix LC = Lp * aug.C_N;
  Matrix M(nx + nc, nx + nc);
  M.topLeftCorner(nx, nx) = aug.A_N + aug.dA_N + aug.B * s.D_c * LC;
  M.topRightCorner(nx, nc) = aug.B * s.C_c;
  M.bottomLeftCorner(nc, nx) = s.B_c * LC;
  M.bottomRightCorner(nc, nc) = s.A_c;
  return M;
}

}  // namespace

std::vector<double> SimulateScalar(double lambda, double q, double x0, const SimConfig& cfg) {
  const Matrix Z = Integrate(Matrix::Constant(1, 1, lambda), nullptr,
                             Vector::Constant(1, x0), q, cfg);
  return std::vector<double>(Z.data(), Z.data() + Z.rows());
}

Trajectory Simulate(const plant::MultiAgentSystem& sys, const plant::ControllerRealization& ctrl,
                    const Vector& x0, const SimConfig& cfg) {
  sys.Validate();
  const auto& d = sys.dynamics;
  const int N = sys.agents(), n = d.n(), m = d.m(), p = d.p(), nc = ctrl.n_c;
  ctrl.Validate(N, m, p);
  if (x0.size() != N * n) throw DimensionError("Simulate(): x0 must hold agents * n entries");
  cfg.Validate();
  if (ctrl.fragility) CheckFragility(*ctrl.fragility, cfg.t_end, cfg.dt);

  const plant::Augmented aug = plant::Augment(sys);
  const Matrix Lp = linalg::Kron(topology::Laplacian(sys.graph), Matrix::Identity(p, p));
  const Matrix LC = Lp * aug.C_N;
  const plant::StackedController nominal = plant::Stack(ctrl, n, m, p);
  const Matrix M = LoopMatrix(aug, Lp, nominal);
  const int nx = N * n;

  const auto input = [&](const Vector& z, const plant::StackedController& s) -> Vector {
    return s.C_c * z.tail(N * nc) + s.D_c * (LC * z.head(nx));
  };
  const auto controller_at = [&](double t) {
    return ctrl.fragility ? plant::Stack(plant::PerturbedAt(ctrl, t), n, m, p) : nominal;
  };

  Explicit g;
  if (ctrl.fragility || sys.nonlinearity) {
    g = [&](const Vector& z, double t) -> Vector {
      Vector out = Vector::Zero(z.size());
      const plant::StackedController s = controller_at(t);
      if (ctrl.fragility) out += (LoopMatrix(aug, Lp, s) - M) * z;
      if (sys.nonlinearity) {
        const Vector u = input(z, s);
        for (int i = 0; i < N; ++i) {
          out.segment(i * n, n) +=
              sys.nonlinearity->phi(z.segment(i * n, n), u.segment(i * m, m), t);
        }
      }
      return out;
    };
  }

  Vector z0 = Vector::Zero(nx + N * nc);
  z0.head(nx) = x0;
  const Matrix Z = Integrate(M, g, z0, d.q, cfg);

  Trajectory traj;
  traj.agents = N;
  traj.n = n;
  traj.n_c = nc;
  traj.m = m;
  const int K = static_cast<int>(Z.rows());
  traj.times.resize(K);
  for (int k = 0; k < K; ++k) traj.times[k] = k * cfg.dt;
  traj.x = Z.leftCols(nx);
  traj.xc = Z.rightCols(N * nc);
  traj.u.resize(K, N * m);
  for (int k = 0; k < K; ++k) {
    const Vector z = Z.row(k).transpose();
    traj.u.row(k) = input(z, controller_at(traj.times[k])).transpose();
  }
  traj.e = ConsensusError(traj);
  return traj;
}

Matrix ConsensusError(const Trajectory& traj) {
  const int K = traj.steps(), N = traj.agents, n = traj.n;
  Matrix e = Matrix::Zero(K, N);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < N; ++i) {
      for (int j = i + 1; j < N; ++j) {
        const double dist = (traj.x.row(k).segment(i * n, n) - traj.x.row(k).segment(j * n, n)).norm();
        e(k, i) += dist;
        e(k, j) += dist;
      }
    }
  }
  return e;
}

ErrorIndices ComputeErrorIndices(const std::vector<double>& times, const Matrix& e) {
  if (static_cast<Eigen::Index>(times.size()) != e.rows()) {
    throw DimensionError("ComputeErrorIndices(): time grid and error rows differ");
  }
  const Eigen::Index N = e.cols();
  ErrorIndices out{Vector::Zero(N), Vector::Zero(N), Vector::Zero(N), Vector::Zero(N)};
  for (size_t k = 1; k < times.size(); ++k) {
    const double h = times[k] - times[k - 1], t0 = times[k - 1], t1 = times[k];
    for (Eigen::Index i = 0; i < N; ++i) {
      const double a = e(k - 1, i), b = e(k, i);
      out.ise(i) += 0.5 * h * (a * a + b * b);
      out.iae(i) += 0.5 * h * (std::abs(a) + std::abs(b));
      out.itse(i) += 0.5 * h * (t0 * a * a + t1 * b * b);
      out.itae(i) += 0.5 * h * (t0 * std::abs(a) + t1 * std::abs(b));
    }
  }
  return out;
}

ConsensusVerdict JudgeConsensus(const Trajectory& traj, double fraction, double floor) {
  ConsensusVerdict v;
  if (traj.steps() == 0 || traj.agents == 0) return v;
  v.initial_max = traj.e.row(0).maxCoeff();
  v.final_max = traj.e.row(traj.steps() - 1).maxCoeff();
  v.threshold = std::max(floor, fraction * v.initial_max);
  v.passed = std::isfinite(v.final_max) && v.final_max <= v.threshold;
  return v;
}

FragilityScan CheckFragility(const plant::ControllerFragility& f, double t_end, double dt) {
  FragilityScan scan;
  const auto visit = [&](const std::vector<plant::Perturbation>& list) {
    for (const auto& pert : list) {
      for (double t = 0.0; t <= t_end + 0.5 * dt; t += dt) {
        const Matrix F = pert.FAt(t);
        if (F.size() == 0) continue;
        const double norm = linalg::SpectralNorm(F);
        if (norm > scan.max_norm) {
          scan.max_norm = norm;
          scan.argmax_t = t;
        }
      }
    }
  };
  visit(f.A);
  visit(f.B);
  visit(f.C);
  visit(f.D);
  scan.on_boundary = scan.max_norm >= 1.0 - 1e-12;
  if (scan.max_norm > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "fragility violates F(t)'F(t) <= I: norm " << scan.max_norm << " at t = " << scan.argmax_t;
    throw std::invalid_argument(os.str());
  }
  return scan;
}

plant::ControllerFragility RandomizePhases(const plant::ControllerFragility& f,
                                           std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  plant::ControllerFragility out = f;
  for (auto* list : {&out.A, &out.B, &out.C, &out.D}) {
    for (auto& pert : *list) {
      for (auto& row : pert.F) {
        for (auto& atom : row) atom.phase = phase(rng);
      }
    }
  }
  return out;
}

void WriteCsv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "t";
  const auto header = [&](const char* tag, int dim) {
    for (int i = 0; i < traj.agents; ++i) {
      for (int k = 0; k < dim; ++k) out << "," << tag << "[" << i << "][" << k << "]";
    }
  };
  header("x", traj.n);
  header("xc", traj.n_c);
  header("u", traj.m);
  for (int i = 0; i < traj.agents; ++i) out << ",e[" << i << "]";
  out << "\n";
  char buf[32];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), ",%.9g", v);
    out << buf;
  };
  for (int k = 0; k < traj.steps(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.9g", traj.times[k]);
    out << buf;
    for (const Matrix* mat : {&traj.x, &traj.xc, &traj.u, &traj.e}) {
      for (Eigen::Index c = 0; c < mat->cols(); ++c) put((*mat)(k, c));
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace fracsim
}  // namespace fomas
