#include "cli/scenarios.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "cli/csv.hpp"
#include "conullity/completeness.hpp"
#include "conullity/connection.hpp"
#include "conullity/curvature.hpp"
#include "conullity/errors.hpp"
#include "conullity/expr.hpp"
#include "conullity/foliation.hpp"
#include "conullity/geodesics.hpp"
#include "conullity/gluing.hpp"
#include "conullity/metric.hpp"

namespace conullity::cli {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt_f(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Accumulates the report. Checks carry their own pass/fail tag; notes are
// context. No timings or paths appear here, so a reseeded rerun reproduces
// the file byte for byte.
struct Report {
  std::vector<std::string> lines;
  bool ok = true;

  void note(const std::string& s) { lines.push_back(s); }
  void section(const std::string& name) {
    lines.push_back("");
    lines.push_back("== " + name + " ==");
  }
  void check(bool pass, const std::string& s) {
    lines.push_back(std::string(pass ? "[PASS] " : "[FAIL] ") + s);
    ok = ok && pass;
  }
  void block(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back("  " + line);
  }
  std::string text() const {
    std::string out;
    for (const auto& line : lines) {
      out += line;
      out += '\n';
    }
    return out;
  }
};

// Chunk-free worker pool: an atomic cursor hands out indices, the first
// exception wins and is rethrown after the join. Results must go into
// per-index slots so the schedule cannot influence the output.
void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  std::exception_ptr err;
  const auto body = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int spawn = std::min(workers, count);
  pool.reserve(static_cast<std::size_t>(spawn));
  for (int t = 0; t < spawn; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

struct Draw {
  std::mt19937_64 engine;
  explicit Draw(unsigned long long seed) : engine(seed) {}
  double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(engine);
  }
};

Interval sample_x_window(const ModelSpec& m) {
  if (!m.x_domain.bounded()) return {-1.8, 1.8};
  const double inset = 0.1 * m.x_domain.length();
  return {m.x_domain.lo + inset, m.x_domain.hi - inset};
}

Point draw_point(Draw& rng, const ModelSpec& m, const Interval& xw) {
  Point p;
  p.x = rng.uniform(xw.lo, xw.hi);
  p.u = rng.uniform(-1.2, 1.2);
  p.v.resize(m.n);
  for (int i = 0; i < m.n; ++i) p.v[i] = rng.uniform(-2.0, 2.0);
  return p;
}

ModelSpec default_model() {
  ModelSpec m;
  m.n = 2;
  m.f = {flat_bump(0.0, 1.0, 0.8), parse_field1("2 + 0.3*sin(x)")};
  m.eta = ch_eta(parse_field1("0.4*sin(x)"));
  return m;
}

// mixed backends and an eta with genuine x dependence, for the oracle checks
ModelSpec oracle_model() {
  ModelSpec m;
  m.n = 3;
  m.f = {parse_field1("1 + 0.5*cos(x)"), flat_bump(0.2, 1.5, 0.6), constant_field(0.7)};
  m.eta = parse_field2("cosh(u) + 0.2*sin(x + 1)*sinh(u)");
  return m;
}

GlueSpec default_glue() {
  GlueSpec g;
  g.n = 2;
  g.S = {{0.0, 2.0}, {3.0, 4.5}};
  g.f = {flat_bump(1.0, 1.0, 0.8), flat_bump(3.75, 0.75, 0.5)};
  g.H = parse_field1("-0.5*cos(x)");
  g.eta = ch_eta(parse_field1("0.5*sin(x)"));
  return g;
}

ModelSpec active_model(const RunConfig& cfg) { return cfg.model ? *cfg.model : default_model(); }

int sample_count(const RunConfig& cfg, int fallback) {
  return cfg.samples > 0 ? cfg.samples : fallback;
}

// ------------------------------------------------------------------ invariants

void s_invariants(const RunConfig& cfg, Report& rep, const std::string& dir) {
  const ModelSpec m = active_model(cfg);
  const int count = sample_count(cfg, 200);
  const Interval xw = sample_x_window(m);
  const int d = m.dim();

  Draw rng(cfg.seed + 0x101);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) pts.push_back(draw_point(rng, m, xw));

  struct Row {
    double scal = 0, closed = 0, nres = 0, inv = 0, frame = 0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(count));
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  parallel_for(count, cfg.workers, [&](int i) {
    const Point& p = pts[static_cast<std::size_t>(i)];
    Row& r = rows[static_cast<std::size_t>(i)];
    const MetricData md = metric_at(m, p);
    r.inv = (md.g * md.g_inv - id).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd E = orthonormal_frame(m, p);
    r.frame = (E.transpose() * md.g * E - id).cwiseAbs().maxCoeff();
    r.scal = scalar_curvature(m, p);
    r.closed = -2.0 * m.eta->partial(0, 2, p.x, p.u) / md.eta;
    r.nres = nullity_residual(m, p);
  });

  CsvWriter csv(dir, "invariants.csv",
                {"x", "u", "scal", "scal_closed", "nullity_residual", "inverse_err", "frame_err"});
  double inv_max = 0, frame_max = 0, rel_max = 0, nres_max = 0;
  double scal_lo = std::numeric_limits<double>::infinity(), scal_hi = -scal_lo;
  for (int i = 0; i < count; ++i) {
    const Row& r = rows[static_cast<std::size_t>(i)];
    const Point& p = pts[static_cast<std::size_t>(i)];
    inv_max = std::max(inv_max, r.inv);
    frame_max = std::max(frame_max, r.frame);
    rel_max = std::max(rel_max, std::abs(r.scal - r.closed) / std::max(std::abs(r.closed), 1e-8));
    nres_max = std::max(nres_max, r.nres);
    scal_lo = std::min(scal_lo, r.scal);
    scal_hi = std::max(scal_hi, r.scal);
    csv.row({CsvWriter::num(p.x), CsvWriter::num(p.u), CsvWriter::num(r.scal),
             CsvWriter::num(r.closed), CsvWriter::num(r.nres), CsvWriter::num(r.inv),
             CsvWriter::num(r.frame)});
  }

  rep.note(std::to_string(count) + " sample points");
  rep.check(inv_max < cfg.tolerance("inverse"),
            "closed-form inverse against the assembled metric, worst entry " + fmt(inv_max));
  rep.check(frame_max < cfg.tolerance("frame"),
            "orthonormal frame gram matrix, worst entry " + fmt(frame_max));
  rep.check(rel_max < cfg.tolerance("scal_rel"),
            "scalar curvature against -2 eta_uu / eta, worst relative gap " + fmt(rel_max));
  rep.check(nres_max < cfg.tolerance("nullity"),
            "curvature components touching a leaf direction, worst residual " + fmt(nres_max));
  if (scal_hi - scal_lo < 5e-7)
    rep.note("Scal = " + fmt_f(0.5 * (scal_lo + scal_hi)) + " everywhere on the sample set");
  else
    rep.note("Scal ranges over [" + fmt_f(scal_lo) + ", " + fmt_f(scal_hi) + "]");
}

// ------------------------------------------------------------ curvature oracles

void s_curvature(const RunConfig& cfg, Report& rep, const std::string& dir) {
  const ModelSpec m = cfg.model ? *cfg.model : oracle_model();
  const Interval xw = sample_x_window(m);
  const int d = m.dim();
  const int n_sym = sample_count(cfg, 500);
  const int n_orc = sample_count(cfg, 200);
  const int n_pln = sample_count(cfg, 100);

  CsvWriter csv(dir, "curvature.csv", {"kind", "x", "u", "value"});
  Draw rng(cfg.seed + 0x202);

  // mixed symbols against their closed forms; everything without an x stays 0
  {
    std::vector<Point> pts;
    for (int i = 0; i < n_sym; ++i) pts.push_back(draw_point(rng, m, xw));
    std::vector<double> gap(static_cast<std::size_t>(n_sym)), zero(gap);
    parallel_for(n_sym, cfg.workers, [&](int t) {
      const Point& p = pts[static_cast<std::size_t>(t)];
      const MetricData md = metric_at(m, p);
      const auto G = christoffel_at(m, p);
      const double eta_u = m.eta->partial(0, 1, p.x, p.u);
      double worst = 0.0;

      Eigen::VectorXd closed = md.g_inv.col(0) * (md.eta * eta_u + m.f_at(1, p.x) * md.b[1]);
      closed += md.g_inv.col(2) * m.f_at(1, p.x);
      for (int k = 0; k < d; ++k) worst = std::max(worst, std::abs(G[k](0, 1) - closed[k]));

      for (int i = 1; i <= m.n; ++i) {
        const double fi = m.f_at(i, p.x);
        const double fi1 = m.f_at(i + 1, p.x);
        const double bhi = i + 1 <= m.n ? md.b[i + 1] : 0.0;
        Eigen::VectorXd c = md.g_inv.col(0) * (-fi * md.b[i - 1] + fi1 * bhi);
        c -= md.g_inv.col(1 + (i - 1)) * fi;
        if (i + 1 <= m.n) c += md.g_inv.col(1 + (i + 1)) * fi1;
        for (int k = 0; k < d; ++k) worst = std::max(worst, std::abs(G[k](0, 1 + i) - c[k]));
      }
      gap[static_cast<std::size_t>(t)] = worst;

      double z = 0.0;
      for (int k = 0; k < d; ++k)
        for (int a = 1; a < d; ++a)
          for (int b = 1; b < d; ++b) z = std::max(z, std::abs(G[k](a, b)));
      zero[static_cast<std::size_t>(t)] = z;
    });
    double gap_max = 0, zero_max = 0;
    for (int t = 0; t < n_sym; ++t) {
      gap_max = std::max(gap_max, gap[static_cast<std::size_t>(t)]);
      zero_max = std::max(zero_max, zero[static_cast<std::size_t>(t)]);
      csv.row({"christoffel", CsvWriter::num(pts[static_cast<std::size_t>(t)].x),
               CsvWriter::num(pts[static_cast<std::size_t>(t)].u),
               CsvWriter::num(gap[static_cast<std::size_t>(t)])});
    }
    rep.note(std::to_string(n_sym) + " symbol samples, " + std::to_string(n_orc) +
             " oracle samples, " + std::to_string(n_pln) + " planes");
    rep.check(gap_max < cfg.tolerance("christoffel"),
              "mixed symbols against inverse-column closed forms, worst gap " + fmt(gap_max));
    rep.check(zero_max < cfg.tolerance("zero_block"),
              "symbols without an x index, worst magnitude " + fmt(zero_max));
  }

  // curvature components against the eta_uu / eta ratio, frame data, recursion
  {
    std::vector<Point> pts;
    for (int i = 0; i < n_orc; ++i) pts.push_back(draw_point(rng, m, xw));
    struct Row {
      double rxuu = 0, frenet = 0, recur = 0, nilpotent = 0;
    };
    std::vector<Row> rows(static_cast<std::size_t>(n_orc));
    parallel_for(n_orc, cfg.workers, [&](int t) {
      const Point& p = pts[static_cast<std::size_t>(t)];
      Row& r = rows[static_cast<std::size_t>(t)];
      const MetricData md = metric_at(m, p);
      const CurvatureData cd = riemann_at(m, p);
      const double ratio = m.eta->partial(0, 2, p.x, p.u) / md.eta;

      double worst = std::abs(cd.up_at(0, 0, 1, 1) + ratio);
      worst = std::max(worst, std::abs(cd.up_at(1, 0, 1, 1) - md.g(0, 1) * ratio));
      for (int i = 1; i <= m.n; ++i)
        worst = std::max(worst, std::abs(cd.up_at(1 + i, 0, 1, 1) - md.g(0, 1 + i) * ratio));
      worst = std::max(worst, std::abs(cd.low_at(0, 1, 1, 0) + md.eta * md.eta * ratio));
      r.rxuu = worst;

      const FrenetData fd = frenet_at(m, p);
      const double eta_u = m.eta->partial(0, 1, p.x, p.u);
      double fgap = std::abs(fd.beta + eta_u / md.eta);
      for (int i = 1; i <= m.n; ++i)
        fgap = std::max(fgap, std::abs(fd.a[i - 1] - m.f_at(i, p.x) / md.eta));
      r.frenet = fgap;
      r.recur = covariant_residual(m, p);
      r.nilpotent = (fd.splitting * fd.splitting).cwiseAbs().maxCoeff();
    });
    double rx = 0, fr = 0, rc = 0, np = 0;
    for (int t = 0; t < n_orc; ++t) {
      const Row& r = rows[static_cast<std::size_t>(t)];
      rx = std::max(rx, r.rxuu);
      fr = std::max(fr, r.frenet);
      rc = std::max(rc, r.recur);
      np = std::max(np, r.nilpotent);
      csv.row({"r_xuu", CsvWriter::num(pts[static_cast<std::size_t>(t)].x),
               CsvWriter::num(pts[static_cast<std::size_t>(t)].u), CsvWriter::num(r.rxuu)});
      csv.row({"frenet", CsvWriter::num(pts[static_cast<std::size_t>(t)].x),
               CsvWriter::num(pts[static_cast<std::size_t>(t)].u), CsvWriter::num(r.frenet)});
      csv.row({"recursion", CsvWriter::num(pts[static_cast<std::size_t>(t)].x),
               CsvWriter::num(pts[static_cast<std::size_t>(t)].u), CsvWriter::num(r.recur)});
    }
    rep.check(rx < cfg.tolerance("curvature"),
              "R(., dx, du, du) components against the eta_uu ratio, worst gap " + fmt(rx));
    rep.check(fr < cfg.tolerance("frenet"),
              "frame curvatures f_i / eta and -eta_u / eta, worst gap " + fmt(fr));
    rep.check(rc < cfg.tolerance("recursion"),
              "leaf-direction derivative recursion, worst gap " + fmt(rc));
    rep.check(np == 0.0, "splitting matrix squares to zero exactly, worst entry " + fmt(np));
  }

  // second u-derivative of eta / f_1 reproduces the plane curvature
  {
    const double h = 1e-2;
    int used = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 400 && used < 12; ++trial) {
      const Point p = draw_point(rng, m, xw);
      const double f1 = m.f_at(1, p.x);
      if (std::abs(f1) < 0.4) continue;
      ++used;
      const auto phi = [&](double du) { return m.eta->partial(0, 0, p.x, p.u + du) / f1; };
      const double second =
          (-phi(2 * h) + 16 * phi(h) - 30 * phi(0) + 16 * phi(-h) - phi(-2 * h)) / (12 * h * h);
      const double sec =
          plane_sec(m, p, Eigen::VectorXd::Unit(d, m.n), Eigen::VectorXd::Unit(d, m.n + 1));
      const double gap = std::abs(second + sec * phi(0)) / (1.0 + std::abs(second));
      worst = std::max(worst, gap);
      csv.row({"oscillator", CsvWriter::num(p.x), CsvWriter::num(p.u), CsvWriter::num(gap)});
    }
    if (used == 0)
      rep.note("oscillator check skipped: |f_1| stays below 0.4 on the sample window");
    else
      rep.check(worst < cfg.tolerance("one_over_a1"),
                "eta / f_1 obeys the plane-curvature oscillator equation, worst residual " +
                    fmt(worst));
  }

  // plane curvature against the direct low-index contraction
  {
    std::vector<Point> pts;
    std::vector<Eigen::VectorXd> as, bs, nulls;
    for (int i = 0; i < n_pln; ++i) {
      pts.push_back(draw_point(rng, m, xw));
      Eigen::VectorXd a(d), b(d), nv(d);
      for (int k = 0; k < d; ++k) a[k] = rng.uniform(-1.0, 1.0);
      for (int k = 0; k < d; ++k) b[k] = rng.uniform(-1.0, 1.0);
      nv.setZero();
      for (int k = 0; k < m.n; ++k) nv[k] = rng.uniform(-1.0, 1.0);
      if (nv.cwiseAbs().maxCoeff() < 0.1) nv[0] = 1.0;
      as.push_back(a);
      bs.push_back(b);
      nulls.push_back(nv);
    }
    std::vector<double> gap(static_cast<std::size_t>(n_pln)), ns(gap);
    parallel_for(n_pln, cfg.workers, [&](int t) {
      const Point& p = pts[static_cast<std::size_t>(t)];
      const MetricData md = metric_at(m, p);
      const CurvatureData cd = riemann_at(m, p);
      const Eigen::MatrixXd E = orthonormal_frame(m, p);

      // basis order (T_1..T_n, e_1, e_2) in coordinates
      std::vector<Eigen::VectorXd> basis;
      for (int i = 1; i <= m.n; ++i) basis.push_back(Eigen::VectorXd::Unit(d, 1 + i));
      basis.push_back(Eigen::VectorXd::Unit(d, 1));
      basis.push_back(E.col(0));

      const auto span = [&](const Eigen::VectorXd& coeff) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
        for (int k = 0; k < d; ++k) out += coeff[k] * basis[static_cast<std::size_t>(k)];
        return out;
      };
      const auto contract = [&](const Eigen::VectorXd& A, const Eigen::VectorXd& B) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
              for (int mm = 0; mm < d; ++mm)
                acc += A[i] * B[j] * B[k] * A[mm] * cd.low_at(i, j, k, mm);
        const double gaa = A.dot(md.g * A), gbb = B.dot(md.g * B), gab = A.dot(md.g * B);
        return acc / (gaa * gbb - gab * gab);
      };

      const Eigen::VectorXd A = span(as[static_cast<std::size_t>(t)]);
      const Eigen::VectorXd B = span(bs[static_cast<std::size_t>(t)]);
      const double direct = contract(A, B);
      const double sec = plane_sec(m, p, as[static_cast<std::size_t>(t)], bs[static_cast<std::size_t>(t)]);
      gap[static_cast<std::size_t>(t)] = std::abs(sec - direct) / (1.0 + std::abs(direct));

      // any plane holding a leaf direction is flat
      Eigen::VectorXd bn = bs[static_cast<std::size_t>(t)];
      ns[static_cast<std::size_t>(t)] =
          std::abs(plane_sec(m, p, nulls[static_cast<std::size_t>(t)], bn));
    });
    double g_max = 0, n_max = 0;
    for (int t = 0; t < n_pln; ++t) {
      g_max = std::max(g_max, gap[static_cast<std::size_t>(t)]);
      n_max = std::max(n_max, ns[static_cast<std::size_t>(t)]);
      csv.row({"plane", CsvWriter::num(pts[static_cast<std::size_t>(t)].x),
               CsvWriter::num(pts[static_cast<std::size_t>(t)].u),
               CsvWriter::num(gap[static_cast<std::size_t>(t)])});
      csv.row({"plane_null", CsvWriter::num(pts[static_cast<std::size_t>(t)].x),
               CsvWriter::num(pts[static_cast<std::size_t>(t)].u),
               CsvWriter::num(ns[static_cast<std::size_t>(t)])});
    }
    rep.check(g_max < cfg.tolerance("plane"),
              "plane curvature against the direct contraction, worst gap " + fmt(g_max));
    rep.check(n_max < cfg.tolerance("plane_null"),
              "planes holding a leaf direction are flat, worst magnitude " + fmt(n_max));
  }
}

// ---------------------------------------------------------------------- geodesics

void s_geodesics(const RunConfig& cfg, Report& rep, const std::string& dir) {
  const ModelSpec m = active_model(cfg);
  const Interval xw = sample_x_window(m);
  const int d = m.dim();
  const int n_exp = sample_count(cfg, 50);
  const int n_var = sample_count(cfg, 20);

  CsvWriter csv(dir, "geodesics.csv", {"kind", "x", "aux", "value"});
  Draw rng(cfg.seed + 0x303);

  // the leaf exponential is the identity in (u, v) coordinates
  {
    std::vector<double> x0s, radii;
    std::vector<Eigen::VectorXd> ws;
    for (int i = 0; i < n_exp; ++i) {
      x0s.push_back(rng.uniform(xw.lo, xw.hi));
      Eigen::VectorXd w(m.n + 1);
      for (int k = 0; k <= m.n; ++k) w[k] = rng.uniform(-1.0, 1.0);
      if (w.norm() < 0.1) w[0] = 1.0;
      const double r = rng.uniform(0.1, 10.0);
      w *= r / w.norm();
      ws.push_back(w);
      radii.push_back(r);
    }
    std::vector<double> res(static_cast<std::size_t>(n_exp));
    parallel_for(n_exp, cfg.workers, [&](int i) {
      Eigen::VectorXd expect(d);
      expect[0] = x0s[static_cast<std::size_t>(i)];
      expect.tail(m.n + 1) = ws[static_cast<std::size_t>(i)];
      const Point got = exp_map(m, x0s[static_cast<std::size_t>(i)], ws[static_cast<std::size_t>(i)]);
      res[static_cast<std::size_t>(i)] = (got.coords() - expect).cwiseAbs().maxCoeff();
    });
    double worst = 0;
    for (int i = 0; i < n_exp; ++i) {
      worst = std::max(worst, res[static_cast<std::size_t>(i)]);
      csv.row({"expmap", CsvWriter::num(x0s[static_cast<std::size_t>(i)]),
               CsvWriter::num(radii[static_cast<std::size_t>(i)]),
               CsvWriter::num(res[static_cast<std::size_t>(i)])});
    }
    rep.note(std::to_string(n_exp) + " leaf rays, 5 geodesics, " + std::to_string(n_var) +
             " variation points");
    rep.check(worst < cfg.tolerance("expmap"),
              "leaf rays land on their coordinates, worst gap " + fmt(worst));
  }

  // energy is conserved along integrated geodesics
  {
    std::vector<GeodesicState> starts;
    for (int i = 0; i < 5; ++i) {
      GeodesicState st;
      st.p = draw_point(rng, m, xw);
      Eigen::VectorXd w(d);
      for (int k = 0; k < d; ++k) w[k] = rng.uniform(-1.0, 1.0);
      const MetricData md = metric_at(m, st.p);
      st.velocity = w / std::sqrt(w.dot(md.g * w));
      starts.push_back(st);
    }
    std::vector<double> drift(starts.size());
    std::vector<bool> exited(starts.size(), false);
    parallel_for(static_cast<int>(starts.size()), cfg.workers, [&](int i) {
      const Trajectory tr = integrate_geodesic(m, starts[static_cast<std::size_t>(i)], 5.0);
      drift[static_cast<std::size_t>(i)] = tr.max_speed_drift();
      exited[static_cast<std::size_t>(i)] = tr.left_domain;
    });
    double worst = 0;
    int left = 0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
      worst = std::max(worst, drift[i]);
      left += exited[i] ? 1 : 0;
      csv.row({"speed_drift", CsvWriter::num(starts[i].p.x), CsvWriter::num(5.0),
               CsvWriter::num(drift[i])});
    }
    if (left > 0) rep.note(std::to_string(left) + " geodesics left the x-domain early");
    rep.check(worst < cfg.tolerance("speed_drift"),
              "speed along unit geodesics, worst drift " + fmt(worst));
  }

  // variation field of the leaf exponential against its closed form
  {
    std::vector<Point> pts;
    for (int i = 0; i < n_var; ++i) pts.push_back(draw_point(rng, m, xw));
    std::vector<double> res(static_cast<std::size_t>(n_var)), inner(res);
    parallel_for(n_var, cfg.workers, [&](int i) {
      const JacobiCheck jc = dphi_dx_check(m, pts[static_cast<std::size_t>(i)]);
      res[static_cast<std::size_t>(i)] = jc.residual;
      inner[static_cast<std::size_t>(i)] = jc.inner_residual;
    });
    double r_max = 0, i_max = 0;
    for (int i = 0; i < n_var; ++i) {
      r_max = std::max(r_max, res[static_cast<std::size_t>(i)]);
      i_max = std::max(i_max, inner[static_cast<std::size_t>(i)]);
      csv.row({"dphi", CsvWriter::num(pts[static_cast<std::size_t>(i)].x),
               CsvWriter::num(pts[static_cast<std::size_t>(i)].u),
               CsvWriter::num(res[static_cast<std::size_t>(i)])});
      csv.row({"dphi_inner", CsvWriter::num(pts[static_cast<std::size_t>(i)].x),
               CsvWriter::num(pts[static_cast<std::size_t>(i)].u),
               CsvWriter::num(inner[static_cast<std::size_t>(i)])});
    }
    rep.check(r_max < cfg.tolerance("dphi"),
              "variation field against the closed form, worst gap " + fmt(r_max));
    rep.check(i_max < cfg.tolerance("inner"),
              "variation-field pairings, worst relative gap " + fmt(i_max));
  }
}

// ------------------------------------------------------------------ completeness

void s_completeness(const RunConfig& cfg, Report& rep, const std::string& dir) {
  CsvWriter csv(dir, "completeness.csv",
                {"case", "verdict", "ratio_max", "epsilon", "kgamma_sup", "scal_sup",
                 "jacobi_exact"});
  const auto emit = [&](const std::string& name, const CertificateReport& r) {
    csv.row({name, to_string(r.verdict), CsvWriter::num(r.ratio_max), CsvWriter::num(r.epsilon),
             CsvWriter::num(r.kgamma_sup), CsvWriter::num(r.scal_sup),
             CsvWriter::num(r.jacobi_exact)});
  };
  const auto is_complete = [](Verdict v) {
    return v == Verdict::CompleteByCor || v == Verdict::CompleteByProp2 ||
           v == Verdict::CompleteByProp1;
  };

  if (cfg.model) {
    // a degenerate eta inside the window aborts the grid sweep; retreat the
    // u window toward the spine (eta = 1 there) so the ratio evidence can
    // still be reported, but never certify a model that degenerates
    CertificateGrid grid;
    CertificateReport r;
    bool degenerate = false;
    for (int attempt = 0;; ++attempt) {
      try {
        r = completeness_certificate(*cfg.model, grid);
        break;
      } catch (const DegenerateMetric& e) {
        degenerate = true;
        if (attempt == 3) {
          rep.check(false, "eta degenerates at (x, u) = (" + fmt(e.x) + ", " + fmt(e.u) +
                               ") even on a quarter-height u window");
          return;
        }
        rep.note("eta degenerates at (x, u) = (" + fmt(e.x) + ", " + fmt(e.u) +
                 "); u window shrunk to [" + fmt(0.5 * grid.u_range.lo) + ", " +
                 fmt(0.5 * grid.u_range.hi) + "]");
        grid.u_range = {0.5 * grid.u_range.lo, 0.5 * grid.u_range.hi};
      }
    }
    emit("configured", r);
    rep.block(r.text());
    if (degenerate && is_complete(r.verdict)) {
      rep.check(false, "eta degenerates off the sampled window, so no completeness "
                       "certificate stands");
    } else if (is_complete(r.verdict)) {
      rep.check(true, std::string("certificate: ") + to_string(r.verdict));
    } else if (r.verdict == Verdict::Inconclusive) {
      std::string why = "certificate is inconclusive: sup |k_gamma| = " + fmt(r.kgamma_sup);
      if (r.kgamma_sup > 1.0) why += " exceeds 1";
      why += " with sup Scal = " + fmt(r.scal_sup) + " at x = " + fmt(r.binding_x);
      rep.check(false, why);
    } else {
      rep.check(false, "the x-domain is a proper interval, not the whole line");
    }
  } else {
    struct Case {
      const char* name;
      Field2 eta;
      Verdict want;
      CertificateGrid grid;
    };
    CertificateGrid wide;
    wide.x_range = {-4.0, 4.0};
    wide.x_samples = 161;
    const std::vector<Case> cases = {
        {"cor", ch_eta(constant_field(0.5)), Verdict::CompleteByCor, CertificateGrid{}},
        {"prop2", parse_field2("cosh(2*u) + 0.8*sinh(2*u)"), Verdict::CompleteByProp2,
         CertificateGrid{}},
        {"prop1-edge", parse_field2("exp(1.2*u)"), Verdict::CompleteByProp1, CertificateGrid{}},
        {"growing", parse_field2("exp(-(x*x + 1)*u)"), Verdict::Inconclusive, wide},
    };
    for (const auto& c : cases) {
      ModelSpec m;
      m.n = 1;
      m.f = {constant_field(0.3)};
      m.eta = c.eta;
      const CertificateReport r = completeness_certificate(m, c.grid);
      emit(c.name, r);
      rep.check(r.verdict == c.want, std::string(c.name) + " classifies as " +
                                         to_string(r.verdict) + " (expected " + to_string(c.want) +
                                         ")");
      if (c.want == Verdict::CompleteByCor) {
        const bool exact = std::abs(r.ratio_max - 0.5) < 1e-12 &&
                           std::abs(r.epsilon - 0.5) < 1e-12 &&
                           std::abs(r.scal_sup + 2.0) < 1e-12 &&
                           std::abs(r.jacobi_exact - std::sqrt(0.75)) < 1e-12;
        rep.check(exact, "cor reproduces ratio 0.5, Scal -2 and floor sqrt(3)/2 exactly");
      }
    }
  }

  // the profile floor min cosh(lt) + c sinh(lt) equals sqrt(1 - c^2)
  {
    CsvWriter floor_csv(dir, "jacobi_floor.csv",
                        {"lambda", "c", "found_min", "closed_min", "abs_gap"});
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double c = static_cast<double>(i) / 50.0;
      const double lambda = 0.3 + 0.1 * i;
      const double found = jacobi_profile_min(lambda, c);
      const double closed = std::sqrt(1.0 - c * c);
      const double gapv = std::abs(found - closed);
      worst = std::max(worst, gapv);
      floor_csv.row({CsvWriter::num(lambda), CsvWriter::num(c), CsvWriter::num(found),
                     CsvWriter::num(closed), CsvWriter::num(gapv)});
    }
    rep.check(worst < cfg.tolerance("jacobi"),
              "profile floor against sqrt(1 - c^2) on 50 values, worst gap " + fmt(worst));
  }
}

// -------------------------------------------------------------------------- warp

void s_warp(const RunConfig& cfg, Report& rep, const std::string& dir) {
  const ModelSpec m = active_model(cfg);
  const int d = m.dim();
  const int count = sample_count(cfg, 200);

  CsvWriter csv(dir, "warp.csv", {"kind", "x", "u", "value"});

  const RotationPath path = solve_rotation(m, {0.0, 10.0}, 1e-3);
  csv.row({"drift", CsvWriter::num(0.0), CsvWriter::num(0.0),
           CsvWriter::num(path.max_pre_projection_drift)});
  rep.check(path.max_pre_projection_drift < cfg.tolerance("rotation_drift"),
            "rotation frames stay orthogonal, worst drift " +
                fmt(path.max_pre_projection_drift));

  {
    double worst = 0.0;
    bool oriented = true;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m.n + 1, m.n + 1);
    for (const std::size_t k :
         {std::size_t{0}, path.S.size() / 2, path.S.size() - 1}) {
      worst = std::max(worst, (path.S[k].transpose() * path.S[k] - id).cwiseAbs().maxCoeff());
      oriented = oriented && path.S[k].determinant() > 0.0;
    }
    rep.check(worst < 1e-10 && oriented,
              "spot-checked frames are special orthogonal, worst gram gap " + fmt(worst));
  }

  // straightened form against the assembled metric
  {
    Draw rng(cfg.seed + 0x505);
    std::vector<Point> pts;
    std::vector<Eigen::VectorXd> ws;
    for (int i = 0; i < count; ++i) {
      Point p;
      p.x = rng.uniform(0.0, 10.0);
      p.u = rng.uniform(-1.2, 1.2);
      p.v.resize(m.n);
      for (int k = 0; k < m.n; ++k) p.v[k] = rng.uniform(-2.0, 2.0);
      pts.push_back(p);
      Eigen::VectorXd w(d);
      for (int k = 0; k < d; ++k) w[k] = rng.uniform(-1.0, 1.0);
      ws.push_back(w);
    }
    std::vector<double> res(static_cast<std::size_t>(count));
    parallel_for(count, cfg.workers, [&](int i) {
      res[static_cast<std::size_t>(i)] =
          warped_residual(m, path, pts[static_cast<std::size_t>(i)], ws[static_cast<std::size_t>(i)]);
    });
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
      worst = std::max(worst, res[static_cast<std::size_t>(i)]);
      csv.row({"residual", CsvWriter::num(pts[static_cast<std::size_t>(i)].x),
               CsvWriter::num(pts[static_cast<std::size_t>(i)].u),
               CsvWriter::num(res[static_cast<std::size_t>(i)])});
    }
    const double packaged = warped_metric_check(m, path, count, cfg.seed + 0x515);
    rep.note(std::to_string(count) + " straightened-form draws");
    rep.check(worst < cfg.tolerance("warp") && packaged < cfg.tolerance("warp"),
              "straightened form matches the metric, worst residual " +
                  fmt(std::max(worst, packaged)));
  }

  // constant profiles integrate to a matrix exponential
  {
    ModelSpec cm;
    cm.n = 2;
    cm.f = {constant_field(1.0), constant_field(2.0)};
    cm.eta = constant_eta(1.0);
    const RotationPath cp = solve_rotation(cm, {0.0, 2.0}, 1e-3);
    const Eigen::MatrixXd A = rotation_generator(cm, 0.0);
    double worst = 0.0;
    for (const std::size_t k : {cp.S.size() / 4, cp.S.size() / 2, cp.S.size() - 1}) {
      const Eigen::MatrixXd closed = (cp.xs[k] * A).exp();
      const double gapv = (cp.S[k] - closed).cwiseAbs().maxCoeff();
      worst = std::max(worst, gapv);
      csv.row({"matexp", CsvWriter::num(cp.xs[k]), CsvWriter::num(0.0), CsvWriter::num(gapv)});
    }
    rep.check(worst < cfg.tolerance("matexp"),
              "constant-profile rotation against the matrix exponential, worst entry " +
                  fmt(worst));
  }
}

// ------------------------------------------------------------------------ foliate

void s_foliate(const RunConfig& cfg, Report& rep, const std::string& dir) {
  const HalfPlane surface;
  const Interval window = cfg.foliation_window;
  const int samples = cfg.foliation_samples;

  CsvWriter csv(dir, "foliation.csv",
                {"case", "seed_s", "seed_u", "foot_s", "dist", "unique", "margin"});

  struct FCase {
    std::string name;
    Field1 H;
  };
  const std::vector<FCase> cases = {
      {"geodesic", constant_field(0.0)},
      {"turning", cfg.foliation_H ? cfg.foliation_H : parse_field1("sin(x)")},
  };

  rep.note(std::to_string(samples) + " samples per case over [" + fmt(window.lo) + ", " +
           fmt(window.hi) + "] x [-1, 1]");
  for (const auto& c : cases) {
    TurningCurve curve;
    try {
      curve = build_turning_curve(surface, c.H, {0.0, 1.0}, {1.0, 0.0},
                                  {window.lo - 1.5, window.hi + 1.5}, 1e-3);
    } catch (const LipschitzViolation& e) {
      rep.check(false, c.name + ": turning function breaks the unit slope bound near s = " +
                           fmt_f(e.s));
      continue;
    }
    const FoliationRegion region{window, -1.0, 1.0};
    const FoliationReport fr = verify_foliation(surface, curve, region, samples,
                                                cfg.seed + 0x606);
    for (const auto& foot : fr.feet)
      csv.row({c.name, CsvWriter::num(foot.seed_s), CsvWriter::num(foot.seed_u),
               CsvWriter::num(foot.foot_s), CsvWriter::num(foot.dist),
               CsvWriter::num(foot.unique ? 1 : 0), CsvWriter::num(foot.convexity_margin)});
    // margin records the slack of the second difference over exp(-d); a
    // nonnegative slack makes the distance beat the exp(-r) bound pointwise
    const double slack = cfg.tolerance("margin_slack");
    rep.check(fr.ok && fr.min_margin >= -slack,
              c.name + ": unique feet with convex distance, min slack " + fmt(fr.min_margin) +
                  " over the exp(-d) convexity bound");
    if (!(fr.ok && fr.min_margin >= -slack)) {
      for (const auto& foot : fr.feet) {
        if (foot.unique && foot.convexity_margin >= -slack) continue;
        rep.note("  first violation seeded at s = " + fmt_f(foot.seed_s) + ", offset " +
                 fmt_f(foot.seed_u) +
                 (foot.unique ? "" : ", rival foot at s = " + fmt_f(foot.rival_s)));
        break;
      }
    }
  }
}

// --------------------------------------------------------------------------- glue

void s_glue(const RunConfig& cfg, Report& rep, const std::string& dir) {
  const GlueSpec g = cfg.glue ? *cfg.glue : default_glue();

  try {
    validate_glue(g);
    rep.check(true, "piece layout, support, slope and spine screens");
  } catch (const Error& e) {
    rep.check(false, std::string("structure rejected: ") + e.what());
    return;
  }

  const std::vector<double> bps = g.boundary_points();

  // derivative products must decay into every boundary
  {
    const DaggerReport dr = check_dagger(g, bps, {-1.5, 1.5});
    CsvWriter csv(dir, "glue_decay.csv", {"product", "boundary_x", "side", "distance", "value"});
    for (const auto& row : dr.rows) {
      // csv-safe product label: eta orders separated by ; instead of ,
      std::string product = "f" + std::to_string(row.profile) + "^(" + std::to_string(row.k) + ")";
      for (const auto& fac : row.factors)
        product += " * eta^(" + std::to_string(fac.a) + ";" + std::to_string(fac.b) + ")";
      for (std::size_t j = 0; j < row.distance.size(); ++j)
        csv.row({product, CsvWriter::num(row.boundary_x), CsvWriter::num(row.side),
                 CsvWriter::num(row.distance[j]), CsvWriter::num(row.value[j])});
    }
    rep.check(dr.pass, "derivative products vanish into the boundaries (" +
                           std::to_string(dr.products) + " products, " +
                           std::to_string(dr.rows.size()) + " rows, " +
                           std::to_string(dr.rows_failed) + " failed)");
    if (!dr.pass) {
      for (const auto& row : dr.rows) {
        if (row.pass) continue;
        rep.note("  first failure: " + row.label() + " at x = " + fmt(row.boundary_x) +
                 (row.side > 0 ? " from above" : " from below") + ", last value " +
                 fmt(row.value.back()));
        break;
      }
    }
  }

  // one-sided derivatives settle and agree across each boundary
  {
    std::vector<double> probe_pts = bps;
    probe_pts.push_back(0.5 * (g.S.front().lo + g.S.front().hi));
    CsvWriter csv(dir, "glue_probe.csv",
                  {"boundary_x", "row", "col", "order", "left", "right", "err_left", "err_right",
                   "cauchy", "agree"});
    bool all_pass = true;
    std::string witness;
    for (const double x : probe_pts) {
      const SmoothnessReport sr = smoothness_probe(g, x, 4);
      for (const auto& row : sr.rows)
        csv.row({CsvWriter::num(x), CsvWriter::num(row.row), CsvWriter::num(row.col),
                 CsvWriter::num(row.order), CsvWriter::num(row.left), CsvWriter::num(row.right),
                 CsvWriter::num(row.err_left), CsvWriter::num(row.err_right),
                 CsvWriter::num(row.cauchy ? 1 : 0), CsvWriter::num(row.agree ? 1 : 0)});
      if (!sr.pass && all_pass) {
        all_pass = false;
        for (const auto& row : sr.rows) {
          if (row.cauchy && row.agree) continue;
          witness = "  first failure at x = " + fmt(x) + ": component (" +
                    std::to_string(row.row) + ", " + std::to_string(row.col) + ") order " +
                    std::to_string(row.order) + ", sides " + fmt(row.left) + " / " +
                    fmt(row.right);
          break;
        }
      }
      all_pass = all_pass && sr.pass;
    }
    rep.check(all_pass, "one-sided metric derivatives to order 4 settle and agree at " +
                            std::to_string(probe_pts.size()) + " probe points");
    if (!witness.empty()) rep.note(witness);
  }

  // informational: where the assembled metric splits off a product factor
  {
    const StripReport st = strip_report(g);
    if (st.strips.empty()) {
      rep.note("no zero strips of the screening length: the metric never splits");
    } else {
      rep.note(std::to_string(st.strips.size()) + " zero strips; the assembled metric is " +
               (st.reducible ? "reducible" : "irreducible"));
      for (const auto& s : st.strips)
        rep.note("  f" + std::to_string(s.profile) + " vanishes on [" + fmt(s.where.lo) + ", " +
                 fmt(s.where.hi) + "]" + (s.tail_vanishes ? ", later profiles too" : ""));
    }
  }
}

// ----------------------------------------------------------------- leaf invariant

double simpson_abs_profile(const ModelSpec& m, double x0, double x1, int steps) {
  double total = 0.0;
  const double h = (x1 - x0) / steps;
  for (int i = 0; i < steps; ++i) {
    const double a = x0 + i * h;
    total += h / 6.0 *
             (std::abs(m.f_at(1, a)) + 4.0 * std::abs(m.f_at(1, a + 0.5 * h)) +
              std::abs(m.f_at(1, a + h)));
  }
  return total;
}

void s_leaf(const RunConfig& cfg, Report& rep, const std::string& dir) {
  const ModelSpec m = active_model(cfg);
  const auto pt = [&](double x, double u, std::initializer_list<double> vs) {
    Point p;
    p.x = x;
    p.u = u;
    p.v = Eigen::VectorXd::Zero(m.n);
    int i = 0;
    for (const double v : vs) {
      if (i >= m.n) break;
      p.v[i++] = v;
    }
    return p;
  };

  const std::vector<Point> direct = {pt(-1, 0, {}), pt(1, 0, {})};
  const std::vector<Point> high = {pt(-1, 0, {}), pt(-0.5, 1.0, {3.0}), pt(0.5, 1.0, {3.0, -1.0}),
                                   pt(1, 0, {})};
  const std::vector<Point> low = {pt(-1, 0, {}), pt(0, -0.8, {1.0, 2.0}), pt(1, 0, {})};

  const double a_direct = leaf_invariant_A(m, direct);
  const double a_high = leaf_invariant_A(m, high);
  const double a_low = leaf_invariant_A(m, low);
  const double spread = std::max(std::abs(a_direct - a_high), std::abs(a_direct - a_low));
  const double reference = simpson_abs_profile(m, -1.0, 1.0, 4000);
  const double within = leaf_invariant_A(
      m, {pt(0.2, 0, {}), pt(0.2, 1.0, {3.0, -2.0}), pt(0.2, -1.0, {0.0, 1.0})});

  CsvWriter csv(dir, "leaf.csv", {"path", "value"});
  csv.row({"direct", CsvWriter::num(a_direct)});
  csv.row({"high", CsvWriter::num(a_high)});
  csv.row({"low", CsvWriter::num(a_low)});
  csv.row({"profile_reference", CsvWriter::num(reference)});
  csv.row({"within_leaf", CsvWriter::num(within)});

  rep.note("crossing integral " + fmt(a_direct) + " between the x = -1 and x = 1 leaves");
  rep.check(spread < cfg.tolerance("leaf_spread"),
            "three paths agree on the crossing integral, spread " + fmt(spread));
  rep.check(std::abs(a_direct - reference) < cfg.tolerance("leaf_match"),
            "crossing integral equals the profile integral, gap " +
                fmt(std::abs(a_direct - reference)));
  rep.check(within < cfg.tolerance("leaf_zero"),
            "paths inside one leaf measure zero, value " + fmt(within));
}

// ---------------------------------------------------------------------- registry

using ScenarioFn = void (*)(const RunConfig&, Report&, const std::string&);

struct ScenarioEntry {
  const char* name;
  const char* blurb;
  const char* outputs;
  ScenarioFn fn;
};

const ScenarioEntry kScenarios[] = {
    {"invariants",
     "metric inverse, orthonormal frame, the scalar-curvature identity and leaf-direction "
     "curvature residuals on random points",
     "invariants.csv", s_invariants},
    {"curvature-oracles",
     "closed-form mixed symbols, the vanishing leaf block, R(., dx, du, du) components, frame "
     "curvatures with their recursion and the plane-curvature formula",
     "curvature.csv", s_curvature},
    {"geodesics",
     "leaf exponential coordinates, energy drift along integrated geodesics and the "
     "variation-field identities",
     "geodesics.csv", s_geodesics},
    {"completeness",
     "certificate verdicts for the worked conformal factors or the configured model, plus the "
     "closed Jacobi floor",
     "completeness.csv, jacobi_floor.csv", s_completeness},
    {"warp",
     "rotation-path orthogonality, the straightened metric form and the constant-profile matrix "
     "exponential",
     "warp.csv", s_warp},
    {"foliate",
     "unique nearest feet and convexity margins for curves of bounded turning in the "
     "half-plane",
     "foliation.csv", s_foliate},
    {"glue",
     "piece validation, boundary derivative decay, one-sided smoothness probes and zero-strip "
     "classification",
     "glue_decay.csv, glue_probe.csv", s_glue},
    {"leaf-invariant", "path independence of the crossing integral and its profile closed form",
     "leaf.csv", s_leaf},
};

}  // namespace

bool scenario_exists(const std::string& name) {
  if (name == "all") return true;
  for (const auto& e : kScenarios)
    if (name == e.name) return true;
  return false;
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& e : kScenarios) out.emplace_back(e.name);
  return out;
}

std::string list_scenarios_text() {
  std::string out;
  for (const auto& e : kScenarios) out += std::string(e.name) + ": " + e.blurb + "\n";
  out += "all: every scenario above, in that order\n";
  return out;
}

std::string describe_text(const std::string& name) {
  if (name == "all")
    return "all\n  runs every scenario in the listed order under one configuration\n";
  for (const auto& e : kScenarios) {
    if (name != e.name) continue;
    std::string out = std::string(e.name) + "\n  " + e.blurb + "\n  writes: " + e.outputs +
                      ", report.txt\n";
    return out;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

int run(const RunConfig& cfg) {
  std::string dir = cfg.output_dir;
  if (const char* env = std::getenv("CONULLITY_OUTPUT_DIR"); env && *env) dir = env;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "'");

  Report rep;
  rep.note("conullity check report");
  rep.note("scenario: " + cfg.scenario);
  rep.note("seed: " + std::to_string(cfg.seed));

  for (const auto& entry : kScenarios) {
    if (cfg.scenario != "all" && cfg.scenario != entry.name) continue;
    rep.section(entry.name);
    try {
      entry.fn(cfg, rep, dir);
    } catch (const std::exception& e) {
      rep.check(false, std::string("aborted: ") + e.what());
    }
  }

  rep.note("");
  rep.note(rep.ok ? "RESULT: PASS" : "RESULT: FAIL");

  {
    std::ofstream out(std::filesystem::path(dir) / "report.txt",
                      std::ios::binary | std::ios::trunc);
    out << rep.text();
  }
  std::fputs(rep.text().c_str(), stdout);
  return rep.ok ? 0 : 1;
}

int run_config_file(const std::string& path) {
  try {
    const RunConfig cfg = load_config(path);
    return run(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
}

}  // namespace conullity::cli
