#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace sotdtco {

/** \brief Small nodal circuit solved by modified nodal analysis.
 *
 *  Node 0 is ground. Voltage sources add one branch-current unknown each.
 *  Nonlinear elements are given as current functions; their Jacobian
 *  entries come from central differences.
 */
class Circuit {
 public:
  enum class Kind { resistor, capacitor, vsource, two_terminal, three_terminal };

  using Waveform = std::function<double(double)>;
  using Iv = std::function<double(double)>;             // i(v_ab), a -> b
  using Iv3 = std::function<double(double, double)>;    // i(v_gs, v_ds), d -> s

  struct Element {
    Kind kind;
    int a = 0, b = 0, c = 0;   // a/b terminals; for FETs a=d, b=s, c=g
    double value = 0;          // R, C
    double mult = 1;           // parallel copies
    Waveform wave;
    Iv iv;
    Iv3 iv3;
    std::string tag;
    int branch = -1;           // vsource unknown index
  };

  Circuit() { names_.push_back("0"); }

  int add_node(const std::string& name) {
    names_.push_back(name);
    return static_cast<int>(names_.size()) - 1;
  }
  int node_count() const { return static_cast<int>(names_.size()); }
  const std::string& node_name(int i) const { return names_.at(i); }
  int find_node(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return -1;
  }

  int resistor(int a, int b, double r, std::string tag = "") {
    require(r > 0, "invalid_circuit", "resistor value must be positive");
    return push({Kind::resistor, a, b, 0, r, 1, {}, {}, {}, std::move(tag)});
  }
  int capacitor(int a, int b, double cap, std::string tag = "") {
    require(cap > 0, "invalid_circuit", "capacitor value must be positive");
    return push({Kind::capacitor, a, b, 0, cap, 1, {}, {}, {}, std::move(tag)});
  }
  int vsource(int a, int b, Waveform w, std::string tag = "") {
    Element e{Kind::vsource, a, b, 0, 0, 1, std::move(w), {}, {}, std::move(tag)};
    e.branch = sources_++;
    return push(std::move(e));
  }
  int vsource(int a, int b, double v, std::string tag = "") {
    return vsource(a, b, [v](double) { return v; }, std::move(tag));
  }
  int two_terminal(int a, int b, Iv f, std::string tag = "", double mult = 1) {
    return push({Kind::two_terminal, a, b, 0, 0, mult, {}, std::move(f), {}, std::move(tag)});
  }
  int fet(int d, int g, int s, Iv3 f, std::string tag = "", double mult = 1) {
    return push({Kind::three_terminal, d, s, g, 0, mult, {}, {}, std::move(f), std::move(tag)});
  }

  const std::vector<Element>& elements() const { return elements_; }

  /// Copy with every capacitor replaced by a source holding its voltage.
  /// Element indices are preserved; appended sources follow the originals.
  Circuit pinned_caps(const std::vector<double>& vcap) const {
    Circuit c = *this;
    for (std::size_t k = 0; k < c.elements_.size(); ++k) {
      auto& e = c.elements_[k];
      if (e.kind != Kind::capacitor) continue;
      double v = vcap[k];
      e.kind = Kind::vsource;
      e.wave = [v](double) { return v; };
      e.branch = c.sources_++;
    }
    return c;
  }

  int source_count() const { return sources_; }
  int unknowns() const { return node_count() - 1 + sources_; }

  void validate() const {
    std::vector<int> parent(node_count());
    for (int i = 0; i < node_count(); ++i) parent[i] = i;
    std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    for (const auto& e : elements_) {
      int n = node_count();
      require(e.a >= 0 && e.a < n && e.b >= 0 && e.b < n && e.c >= 0 && e.c < n, "invalid_circuit",
              "element terminal refers to missing node");
      parent[root(e.a)] = root(e.b);
      if (e.kind == Kind::three_terminal) parent[root(e.c)] = root(e.b);
    }
    for (int i = 1; i < node_count(); ++i)
      require(root(i) == root(0), "invalid_circuit", "node '" + names_[i] + "' is floating");
  }

  /// Current through element (a -> b, or d -> s) for a solution vector of node voltages.
  double element_current(const Element& e, const std::vector<double>& v, double v_prev_a_b,
                         double dt, const std::vector<double>& x) const {
    switch (e.kind) {
      case Kind::resistor: return (v[e.a] - v[e.b]) / e.value;
      case Kind::capacitor:
        return dt > 0 ? e.value * ((v[e.a] - v[e.b]) - v_prev_a_b) / dt : 0.0;
      case Kind::vsource: return x[node_count() - 1 + e.branch];
      case Kind::two_terminal: return e.mult * e.iv(v[e.a] - v[e.b]);
      case Kind::three_terminal: return e.mult * e.iv3(v[e.c] - v[e.b], v[e.a] - v[e.b]);
    }
    return 0;
  }

 private:
  int push(Element e) {
    elements_.push_back(std::move(e));
    return static_cast<int>(elements_.size()) - 1;
  }
  std::vector<std::string> names_;
  std::vector<Element> elements_;
  int sources_ = 0;
};

struct NewtonOptions {
  int max_iter = 100;
  double abstol_i = 1e-12;   // A
  double vtol = 1e-9;        // V
  double max_step_v = 0.3;   // V, per-iteration voltage limit
  double fd_step = 1e-6;     // V
};

struct DcResult {
  std::vector<double> v;        // node voltages, v[0] = 0
  std::vector<double> i_src;    // per source, flowing a -> b inside the source
  int iterations = 0;
  double max_residual = 0;
  int worst_node = 0;
  bool converged = false;
};

namespace detail {

/// Assembles the MNA residual and Jacobian. Capacitors use a backward-Euler
/// companion when dt > 0 and are open otherwise.
struct Mna {
  const Circuit& ckt;
  double t;
  double dt;
  const std::vector<double>* v_cap_prev;  // per-element previous branch voltage
  double fd;

  int n() const { return ckt.node_count() - 1; }

  void eval(const Eigen::VectorXd& x, Eigen::VectorXd& f, Eigen::MatrixXd* J) const {
    const int nn = n();
    const int m = ckt.unknowns();
    f.setZero(m);
    if (J) J->setZero(m, m);
    auto V = [&](int node) { return node == 0 ? 0.0 : x[node - 1]; };
    auto addf = [&](int node, double i) { if (node) f[node - 1] += i; };
    auto addJ = [&](int r, int c, double g) { if (J && r && c) (*J)(r - 1, c - 1) += g; };
    const auto& els = ckt.elements();
    for (std::size_t k = 0; k < els.size(); ++k) {
      const auto& e = els[k];
      switch (e.kind) {
        case Circuit::Kind::resistor: {
          double g = 1 / e.value;
          double i = g * (V(e.a) - V(e.b));
          addf(e.a, i); addf(e.b, -i);
          addJ(e.a, e.a, g); addJ(e.a, e.b, -g); addJ(e.b, e.a, -g); addJ(e.b, e.b, g);
          break;
        }
        case Circuit::Kind::capacitor: {
          if (dt <= 0) break;
          double g = e.value / dt;
          double i = g * ((V(e.a) - V(e.b)) - (*v_cap_prev)[k]);
          addf(e.a, i); addf(e.b, -i);
          addJ(e.a, e.a, g); addJ(e.a, e.b, -g); addJ(e.b, e.a, -g); addJ(e.b, e.b, g);
          break;
        }
        case Circuit::Kind::vsource: {
          int br = nn + e.branch;
          double j = x[br];
          addf(e.a, j); addf(e.b, -j);
          f[br] = V(e.a) - V(e.b) - e.wave(t);
          if (J) {
            if (e.a) { (*J)(e.a - 1, br) += 1; (*J)(br, e.a - 1) += 1; }
            if (e.b) { (*J)(e.b - 1, br) -= 1; (*J)(br, e.b - 1) -= 1; }
          }
          break;
        }
        case Circuit::Kind::two_terminal: {
          double v = V(e.a) - V(e.b);
          double i = e.mult * e.iv(v);
          addf(e.a, i); addf(e.b, -i);
          if (J) {
            double g = e.mult * (e.iv(v + fd) - e.iv(v - fd)) / (2 * fd);
            addJ(e.a, e.a, g); addJ(e.a, e.b, -g); addJ(e.b, e.a, -g); addJ(e.b, e.b, g);
          }
          break;
        }
        case Circuit::Kind::three_terminal: {
          const int d = e.a, s = e.b, gn = e.c;
          double vgs = V(gn) - V(s), vds = V(d) - V(s);
          double i = e.mult * e.iv3(vgs, vds);
          addf(d, i); addf(s, -i);
          if (J) {
            double gm = e.mult * (e.iv3(vgs + fd, vds) - e.iv3(vgs - fd, vds)) / (2 * fd);
            double gds = e.mult * (e.iv3(vgs, vds + fd) - e.iv3(vgs, vds - fd)) / (2 * fd);
            // di/dVd = gds, di/dVg = gm, di/dVs = -gm - gds
            addJ(d, d, gds); addJ(d, gn, gm); addJ(d, s, -gm - gds);
            addJ(s, d, -gds); addJ(s, gn, -gm); addJ(s, s, gm + gds);
          }
          break;
        }
      }
    }
  }
};

}  // namespace detail

/** \brief Damped Newton on the MNA equations.
 *
 *  x0 holds node voltages (size node_count, entry 0 ignored). With dt > 0 the
 *  capacitors are replaced by their backward-Euler companions around v_cap_prev.
 */
inline DcResult newton_solve(const Circuit& ckt, const std::vector<double>& v0, double t, double dt,
                             const std::vector<double>& v_cap_prev, const NewtonOptions& opt = {}) {
  const int nn = ckt.node_count() - 1;
  const int m = ckt.unknowns();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m), f(m), fx(m), dx(m);
  for (int i = 0; i < nn; ++i) x[i] = v0.size() > std::size_t(i + 1) ? v0[i + 1] : 0.0;
  // grounded sources are known exactly; starting there avoids dragging them through stiff devices
  for (const auto& e : ckt.elements()) {
    if (e.kind != Circuit::Kind::vsource) continue;
    if (e.b == 0 && e.a) x[e.a - 1] = e.wave(t);
    else if (e.a == 0 && e.b) x[e.b - 1] = -e.wave(t);
  }
  Eigen::MatrixXd J(m, m);
  detail::Mna mna{ckt, t, dt, &v_cap_prev, opt.fd_step};

  auto kcl_norm = [&](const Eigen::VectorXd& r, int* worst) {
    if (!r.allFinite()) return std::numeric_limits<double>::infinity();
    double mx = 0;
    int w = 0;
    for (int i = 0; i < nn; ++i)
      if (std::abs(r[i]) > mx) { mx = std::abs(r[i]); w = i + 1; }
    for (int i = nn; i < m; ++i) mx = std::max(mx, std::abs(r[i]) * 1e-3);  // 1 mV ~ 1 uA scale
    if (worst) *worst = w;
    return mx;
  };

  DcResult res;
  for (int it = 0; it < opt.max_iter; ++it) {
    mna.eval(x, f, &J);
    double r0 = kcl_norm(f, &res.worst_node);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    dx = lu.solve(-f);
    if (!dx.allFinite()) break;
    double vmax = 0;
    for (int i = 0; i < nn; ++i) vmax = std::max(vmax, std::abs(dx[i]));
    double lam = vmax > opt.max_step_v ? opt.max_step_v / vmax : 1.0;
    // backtracking on the residual
    double r1 = 0;
    for (int k = 0; k < 30; ++k) {
      Eigen::VectorXd xt = x + lam * dx;
      mna.eval(xt, fx, nullptr);
      r1 = kcl_norm(fx, nullptr);
      if (r1 <= r0 || r1 < opt.abstol_i) {
        x = xt;
        break;
      }
      lam *= 0.5;
      if (k == 29) x = xt;
    }
    res.iterations = it + 1;
    // a full step this small is at the rounding floor even when large currents keep the residual up
    if (lam * vmax < opt.vtol && (r1 < opt.abstol_i || (lam == 1.0 && vmax < 1e-3 * opt.vtol))) {
      res.converged = true;
      break;
    }
    if (r1 < opt.abstol_i * 1e-3) {
      res.converged = true;
      break;
    }
  }
  mna.eval(x, f, nullptr);
  res.max_residual = kcl_norm(f, &res.worst_node);
  if (res.max_residual < opt.abstol_i) res.converged = true;
  res.v.assign(ckt.node_count(), 0.0);
  for (int i = 0; i < nn; ++i) res.v[i + 1] = x[i];
  res.i_src.assign(ckt.source_count(), 0.0);
  for (int i = 0; i < ckt.source_count(); ++i) res.i_src[i] = x[nn + i];
  return res;
}

inline DcResult solve_dc(const Circuit& ckt, const std::vector<double>& guess = {},
                         const NewtonOptions& opt = {}) {
  ckt.validate();
  std::vector<double> none(ckt.elements().size(), 0.0);
  auto r = newton_solve(ckt, guess, 0.0, 0.0, none, opt);
  if (!r.converged)
    throw Error("dc_nonconvergence", "DC solve did not converge; worst node '" +
                                         ckt.node_name(r.worst_node) + "' residual " +
                                         std::to_string(r.max_residual) + " A");
  return r;
}

// ---------------------------------------------------------------------------
// Transient

struct TransientOptions {
  double t_stop = 10e-9;
  double dt_out = 5e-12;       // output grid
  double dv_max = 1e-3;        // V, accepted step voltage change limit
  int max_halvings = 40;
  NewtonOptions newton{};
  std::function<bool(double t, const std::vector<double>& v)> stop;  // early exit
};

struct TransientResult {
  std::vector<double> t;
  std::vector<std::vector<double>> v;   // [step][node]
  std::vector<std::vector<double>> i;   // [step][element], element current a->b
  std::vector<std::vector<double>> e;   // [step][element], cumulative absorbed energy
  long newton_iterations = 0;
  long steps = 0;
  long rejected = 0;
  double max_kcl_residual = 0;
  double energy_error = 0;   // relative balance error at the end

  /// Linear interpolation of a per-step quantity at time tq.
  static double interp(const std::vector<double>& t, const std::vector<double>& y, double tq) {
    if (tq <= t.front()) return y.front();
    if (tq >= t.back()) return y.back();
    auto it = std::upper_bound(t.begin(), t.end(), tq);
    std::size_t k = static_cast<std::size_t>(it - t.begin());
    double w = (tq - t[k - 1]) / (t[k] - t[k - 1]);
    return y[k - 1] + w * (y[k] - y[k - 1]);
  }
  std::vector<double> node_trace(int node) const {
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k][node];
    return out;
  }
  std::vector<double> current_trace(int el) const {
    std::vector<double> out(i.size());
    for (std::size_t k = 0; k < i.size(); ++k) out[k] = i[k][el];
    return out;
  }
  std::vector<double> energy_trace(int el) const {
    std::vector<double> out(e.size());
    for (std::size_t k = 0; k < e.size(); ++k) out[k] = e[k][el];
    return out;
  }
};

/** \brief Backward-Euler transient with a Newton inner loop.
 *
 *  v_init gives the initial node voltages; only capacitor voltages are
 *  state, the rest is re-solved at t = 0. Steps are halved on Newton failure
 *  or when any node moves by more than dv_max, and grow back afterwards.
 */
inline TransientResult transient(const Circuit& ckt, const std::vector<double>& v_init,
                                 const TransientOptions& opt = {}) {
  ckt.validate();
  const auto& els = ckt.elements();
  const int ne = static_cast<int>(els.size());
  std::vector<double> vcap(ne, 0.0);
  for (int k = 0; k < ne; ++k)
    if (els[k].kind == Circuit::Kind::capacitor) vcap[k] = v_init[els[k].a] - v_init[els[k].b];

  TransientResult out;
  // consistent initial point with the capacitor voltages pinned
  const Circuit pinned = ckt.pinned_caps(vcap);
  std::vector<double> none(ne, 0.0);
  auto init = newton_solve(pinned, v_init, 0.0, 0.0, none, opt.newton);
  require(init.converged, "transient_init", "initial operating point did not converge");

  std::vector<double> v = init.v;
  std::vector<double> cur(ne), energy(ne, 0.0);
  auto currents = [&](const Circuit& cc, const DcResult& r, double dt, const std::vector<double>& vprev) {
    std::vector<double> xf(cc.unknowns());
    for (int i = 1; i < cc.node_count(); ++i) xf[i - 1] = r.v[i];
    for (int i = 0; i < cc.source_count(); ++i) xf[cc.node_count() - 1 + i] = r.i_src[i];
    for (int k = 0; k < ne; ++k) cur[k] = cc.element_current(cc.elements()[k], r.v, vprev[k], dt, xf);
  };
  currents(pinned, init, 0.0, vcap);

  auto record = [&](double t) {
    out.t.push_back(t);
    out.v.push_back(v);
    out.i.push_back(cur);
    out.e.push_back(energy);
  };
  record(0.0);
  for (int k = 0; k < ne; ++k) vcap[k] = v[els[k].a] - v[els[k].b];
  const std::vector<double> vcap0 = vcap;

  // nodes pinned to ground by a source follow their waveform; they do not limit the step
  std::vector<char> watched(ckt.node_count(), 1);
  for (const auto& e : els)
    if (e.kind == Circuit::Kind::vsource) {
      if (e.b == 0) watched[e.a] = 0;
      if (e.a == 0) watched[e.b] = 0;
    }

  double t = 0.0;
  double dt = opt.dt_out;
  long n_out = static_cast<long>(std::ceil(opt.t_stop / opt.dt_out - 1e-9));
  double src_energy = 0, diss_energy = 0;
  const double t_eps = 1e-6 * opt.dt_out;
  for (long s = 1; s <= n_out; ++s) {
    const double t_target = std::min(s * opt.dt_out, opt.t_stop);
    while (t < t_target - t_eps) {
      double h = std::min(dt, t_target - t);
      // avoid leaving a sliver before the output point
      if (t_target - t - h < 0.25 * h) h = t_target - t;
      int halvings = 0;
      DcResult r;
      double dvm = 0;
      for (;;) {
        if (t + h == t)
          throw Error("step_underflow", "transient step below time resolution at t=" + std::to_string(t * 1e9) + " ns");
        r = newton_solve(ckt, v, t + h, h, vcap, opt.newton);
        out.newton_iterations += r.iterations;
        dvm = 0;
        if (r.converged)
          for (int i = 1; i < ckt.node_count(); ++i)
            if (watched[i]) dvm = std::max(dvm, std::abs(r.v[i] - v[i]));
        if (r.converged && dvm <= opt.dv_max) break;
        ++out.rejected;
        if (++halvings > opt.max_halvings)
          throw Error("step_underflow", "transient step underflow at t=" + std::to_string(t * 1e9) + " ns");
        h *= r.converged ? std::clamp(0.9 * opt.dv_max / dvm, 0.1, 0.5) : 0.25;
      }
      std::vector<double> vprev = vcap;
      currents(ckt, r, h, vprev);
      out.max_kcl_residual = std::max(out.max_kcl_residual, r.max_residual);
      v = r.v;
      t += h;
      ++out.steps;
      for (int k = 0; k < ne; ++k) {
        const auto& e = els[k];
        double vab = v[e.a] - v[e.b];
        if (e.kind == Circuit::Kind::capacitor) {
          vcap[k] = vab;
          continue;
        }
        double p = vab * cur[k] * h;  // absorbed energy, rectangle at the new point
        energy[k] += p;
        if (e.kind == Circuit::Kind::vsource) src_energy -= p;
        else diss_energy += p;
      }
      double grow = dvm > 0 ? std::clamp(0.9 * opt.dv_max / dvm, 0.5, 2.0) : 2.0;
      dt = std::min(h * grow, opt.dt_out);
    }
    t = t_target;
    record(t);
    if (opt.stop && opt.stop(t, v)) break;
  }
  // stored-energy change on the capacitors
  double stored = 0;
  for (int k = 0; k < ne; ++k) {
    if (els[k].kind != Circuit::Kind::capacitor) continue;
    double c = els[k].value;
    stored += 0.5 * c * (vcap[k] * vcap[k] - vcap0[k] * vcap0[k]);
    // cumulative cap energy reported at the end
    for (std::size_t s = 0; s < out.e.size(); ++s) {
      double vv = out.v[s][els[k].a] - out.v[s][els[k].b];
      out.e[s][k] = 0.5 * c * (vv * vv - vcap0[k] * vcap0[k]);
    }
  }
  double scale = std::max({std::abs(src_energy), std::abs(diss_energy), std::abs(stored), 1e-30});
  out.energy_error = std::abs(src_energy - diss_energy - stored) / scale;
  return out;
}

}  // namespace sotdtco
