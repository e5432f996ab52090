// Acceptance suite: one PASS/FAIL line per criterion, with runtime against its budget.
// Exit status is nonzero when any criterion fails.

#include "riemlab/bundle.hpp"
#include "riemlab/catalog.hpp"
#include "riemlab/cli.hpp"
#include "riemlab/flow.hpp"
#include "riemlab/specialfn.hpp"
#include "riemlab/theorems.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace riemlab;
using std::numbers::pi;
using theorems::BoundReport;
using theorems::Params;
using theorems::RunSettings;
using theorems::Verdict;
using theorems::Workspace;

namespace {

/// Accumulates failed sub-checks of one criterion.
struct Check {
  std::vector<std::string> failures;
  std::string summary;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- 1

double integrate(const std::function<double(double)>& f, double lo, double hi) {
  constexpr int panels = 8;
  const double w = (hi - lo) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i)
    total += boost::math::quadrature::gauss<double, 30>::integrate(f, lo + i * w, lo + (i + 1) * w);
  return total;
}

long double s_ref(double k, long double t) {
  if (k == 0.0) return t;
  const long double q = std::sqrt(std::abs(static_cast<long double>(k)));
  return k > 0.0 ? std::sin(q * t) / q : std::sinh(q * t) / q;
}

double phi_oracle(double k, double r) {
  const long double sr = s_ref(k, r);
  return integrate([&](double t) { return static_cast<double>(s_ref(k, t) * s_ref(k, t) / (sr * sr)); }, 0.0, r);
}

double sigma_oracle(double k, double r) {
  return integrate([&](double tau) { return tau == 0.0 ? 0.0 : phi_oracle(k, tau); }, 0.0, r);
}

void kernel_exactness(Check& c) {
  double worst = 0.0, worst_d = 0.0;
  int count = 0;
  for (double k : {-1.0, -1e-7, 0.0, 1e-7, 1.0}) {
    const double top = k > 0.0 ? 0.95 * pi / std::sqrt(k) : 3.0;
    for (double f : {0.005, 0.05, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      const double r = f * top;
      const specialfn::ModelSpaceParams p{k, 3};
      const double phi_q = phi_oracle(k, r), sig_q = sigma_oracle(k, r);
      const double e = std::max({std::abs(specialfn::phi_k(p, r) - phi_q) / phi_q,
                                 std::abs(specialfn::sigma_k(p, r) - sig_q) / sig_q,
                                 std::abs(specialfn::psi_k(p, r) - sig_q) / sig_q});
      worst = std::max(worst, e);
      c.expect(e <= 1e-9, fmt("kernel k=%g r=%g rel err %.2e", k, r, e));
      const double h = 1e-5 * r;
      const double d = (specialfn::sigma_k(p, r + h) - specialfn::sigma_k(p, r - h)) / (2 * h);
      const double de = std::abs(d - specialfn::phi_k(p, r)) / specialfn::phi_k(p, r);
      worst_d = std::max(worst_d, de);
      c.expect(de <= 1e-6, fmt("dsigma/dr k=%g r=%g rel err %.2e", k, r, de));
      ++count;
    }
  }
  c.summary = fmt("%d (k, r) nodes, max rel err %.1e, max derivative err %.1e", count, worst, worst_d);
}

// ---------------------------------------------------------------- 2

void chord_lemma(Check& c) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst_end = 0.0, worst_gap = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    double m1 = u(rng), m2 = u(rng);
    if (m1 > m2) std::swap(m1, m2);
    const auto ch = specialfn::chord_constants(m1, m2);
    const double e1 = std::abs(ch(m1) - std::exp(m1)) / std::exp(m1);
    const double e2 = std::abs(ch(m2) - std::exp(m2)) / std::exp(m2);
    worst_end = std::max({worst_end, e1, e2});
    for (int i = 0; i < 1000; ++i) {
      const double y = m1 + (m2 - m1) * i / 999.0;
      const double gap = (std::exp(y) - ch(y)) / std::exp(y);
      worst_gap = std::max(worst_gap, gap);
    }
  }
  c.expect(worst_end <= 1e-12, fmt("endpoint mismatch %.2e", worst_end));
  c.expect(worst_gap <= 1e-12, fmt("exp exceeds the chord by %.2e", worst_gap));
  // Shrinking intervals, across the switch to the tangent form.
  double worst_jump = 0.0;
  for (double m : {-3.0, 0.0, 0.7, 2.5}) {
    const double e = std::exp(m);
    for (double w = 1e-4; w >= 1e-14; w /= 3.0) {
      const auto ch = specialfn::chord_constants(m - w / 2, m + w / 2);
      const double jump = std::max(std::abs(ch.a - e) / e, std::abs(ch.b - (1 - m) * e) / std::max(1.0, e));
      worst_jump = std::max(worst_jump, jump);
    }
  }
  c.expect(worst_jump <= 1e-8, fmt("degenerate limit off by %.2e", worst_jump));
  c.summary = fmt("200 pairs x 1000 points: endpoint err %.1e, max violation %.1e, limit err %.1e", worst_end,
                  std::max(0.0, worst_gap), worst_jump);
}

// ---------------------------------------------------------------- 3

bool within_equality_band(const BoundReport& b) {
  return std::abs(b.margin) <= std::max(1e-5 * std::abs(b.rhs), 3 * b.mc_stderr);
}

void constant_curvature(Check& c) {
  const std::vector<std::string> ids = {"check_jacobian_bound", "check_mean_curvature_bound", "check_monotone",
                                        "check_min_F",          "check_average_area",         "check_average_volume",
                                        "check_average_H"};
  int rows = 0;
  double worst = 0.0;
  for (const auto& [name, k] : std::vector<std::pair<std::string, double>>{{"sphere-3", 1.0}, {"torus-3", 0.0}}) {
    Workspace ws(catalog::make(name), RunSettings{2000, 1, 0.0, 0});
    Params p;
    p.k = k;
    p.r = 1.5;
    for (const auto& id : ids)
      for (const auto& b : theorems::run(ws, id, p)) {
        ++rows;
        c.expect(b.verdict == Verdict::holds_at_equality,
                 fmt("%s %s: verdict %s", name.c_str(), b.theorem.c_str(), theorems::to_string(b.verdict).c_str()));
        c.expect(within_equality_band(b), fmt("%s %s: margin %.3e outside band", name.c_str(), b.theorem.c_str(), b.margin));
        worst = std::max(worst, std::abs(b.margin) / std::max(std::abs(b.rhs), 1e-300));
      }
  }
  c.summary = fmt("%d rows on S^3 (k=1) and T^3 (k=0) at r=1.5, max |margin|/|rhs| %.1e", rows, worst);
}

// ---------------------------------------------------------------- 4

void green(Check& c) {
  Params p;
  p.k = 1.0;
  Workspace s3(catalog::make("sphere-3"), RunSettings{2000, 1, 0.0, 0});
  const auto a = theorems::check_green(s3, p).front();
  c.expect(std::abs(a.lhs - pi) <= 1e-3, fmt("conjugate radius %.7f", a.lhs));
  c.expect(a.verdict == Verdict::holds_at_equality, "S^3 verdict " + theorems::to_string(a.verdict));
  Workspace t3(catalog::make("torus-3"), RunSettings{2000, 1, 0.0, 0});
  const auto b = theorems::check_green(t3, p).front();
  c.expect(b.verdict == Verdict::inconclusive, "T^3 verdict " + theorems::to_string(b.verdict));
  c.summary = fmt("S^3 conjugate radius %.7f (%s), T^3 %s", a.lhs, theorems::to_string(a.verdict).c_str(),
                  theorems::to_string(b.verdict).c_str());
}

// ---------------------------------------------------------------- 5

void liouville(Check& c) {
  const std::vector<double> ts = {0.0, 0.3, 0.7, 1.0};
  std::string summary;
  for (const char* name : {"ellipsoid", "torus-3"}) {
    const auto spec = catalog::make(name);
    const auto set = build_records(spec, sample_sn(spec, 10000, 1), 1.0);
    const auto table = liouville_check(set, ts, 0.0);
    // Rbar from the catalog's deterministic quadrature when available, so t = 0 is not compared with itself.
    const auto sampled = average_scalar(set);
    const double target = spec.meta.mean_scalar ? *spec.meta.mean_scalar / spec.n : sampled.mean / spec.n;
    const double target_se = spec.meta.mean_scalar ? 0.0 : sampled.std_error / spec.n;
    double spread = 0.0;
    for (std::size_t a = 0; a < ts.size(); ++a) {
      const double band = 3 * std::hypot(table[a].std_error, target_se);
      c.expect(std::abs(table[a].mean - target) <= std::max(band, 1e-12),
               fmt("%s t=%g: %.6f vs Rbar/n %.6f (3se %.1e)", name, ts[a], table[a].mean, target, band));
      for (std::size_t b = a + 1; b < ts.size(); ++b) {
        const double se = std::hypot(table[a].std_error, table[b].std_error);
        spread = std::max(spread, std::abs(table[a].mean - table[b].mean) / std::max(se, 1e-300));
        c.expect(std::abs(table[a].mean - table[b].mean) <= std::max(3 * se, 1e-12),
                 fmt("%s t=%g vs t=%g differ by %.2e (3se %.1e)", name, ts[a], ts[b],
                     table[a].mean - table[b].mean, 3 * se));
      }
    }
    summary += fmt("%s%s Rbar/n=%.5f, averages %.5f..%.5f", summary.empty() ? "" : "; ", name, target,
                   std::min({table[0].mean, table[1].mean, table[2].mean, table[3].mean}),
                   std::max({table[0].mean, table[1].mean, table[2].mean, table[3].mean}));
  }
  c.summary = summary + " (10000 samples)";
}

// ---------------------------------------------------------------- 6

void strict_inequality(Check& c) {
  Workspace ws(catalog::make("ellipsoid"), RunSettings{0, 1, 0.0, 0});
  Params p;
  p.k = 0.0;
  p.r = 0.4;
  const auto area = theorems::check_average_area(ws, p).front();
  const auto h = theorems::check_average_H(ws, p).front();
  c.expect(area.verdict == Verdict::holds && area.margin > 3 * area.mc_stderr,
           fmt("area margin %.3e se %.3e (%s)", area.margin, area.mc_stderr, theorems::to_string(area.verdict).c_str()));
  c.expect(h.verdict == Verdict::holds && h.margin > 3 * h.mc_stderr,
           fmt("H margin %.3e se %.3e (%s)", h.margin, h.mc_stderr, theorems::to_string(h.verdict).c_str()));
  const double a0 = specialfn::model_area({0.0, 2}, 0.4);
  const double improvement = a0 - area.rhs;
  const double se = area.extra("improvement_stderr");
  c.expect(improvement > 3 * se, fmt("rhs %.6f vs A_0 %.6f (se %.2e)", area.rhs, a0, se));
  c.summary = fmt("area margin %.2e (se %.1e), H margin %.2e (se %.1e), A_0 - rhs %.4f (se %.1e)", area.margin,
                  area.mc_stderr, h.margin, h.mc_stderr, improvement, se);
}

// ---------------------------------------------------------------- 7

void taylor(Check& c) {
  Workspace s3(catalog::make("sphere-3"), RunSettings{0, 1, 0.0, 0});
  const auto a = theorems::check_taylor_volume(s3, {}).front();
  c.expect(std::abs(a.lhs + 0.2) <= 0.02 * 0.2, fmt("S^3 coefficient %.6f", a.lhs));
  Workspace t3(catalog::make("torus-3"), RunSettings{0, 1, 0.0, 0});
  const auto b = theorems::check_taylor_volume(t3, {}).front();
  c.expect(std::abs(b.lhs) <= 1e-4, fmt("T^3 coefficient %.3e", b.lhs));
  c.summary = fmt("S^3 coefficient %.6f (target -0.2), T^3 %.1e", a.lhs, b.lhs);
}

// ---------------------------------------------------------------- 8

void counterexample(Check& c) {
  Workspace ws(catalog::make("s2xh2"), RunSettings{0, 1, 0.0, 0});
  Params p;
  p.r_list = {0.3, 0.5};
  std::string summary;
  for (const auto& b : theorems::check_counterexample(ws, p)) {
    const double ratio = b.extra("ratio");
    c.expect(b.rhs > b.lhs, fmt("r=%g: V-tilde %.12g not above %.12g", b.r, b.rhs, b.lhs));
    c.expect(ratio >= 0.5 && ratio <= 2.0, fmt("r=%g: excess ratio %.4f", b.r, ratio));
    c.expect(b.verdict == Verdict::holds, fmt("r=%g: verdict %s", b.r, theorems::to_string(b.verdict).c_str()));
    summary += fmt("%sr=%g excess %.3e = %.3f x r^4/3456", summary.empty() ? "" : "; ", b.r, b.extra("relative_excess"),
                   ratio);
  }
  c.summary = summary;
}

// ---------------------------------------------------------------- 9

void total_volume(Check& c) {
  Workspace ws(catalog::make("sphere-3"), RunSettings{2000, 1, 0.0, 0});
  const double vol = 2 * pi * pi;
  c.expect(std::abs(*ws.spec().meta.volume - vol) <= 1e-6 * vol, "metadata volume");
  double worst = 0.0;
  for (double kappa : {0.1, 1.0, 2.0, 10.0}) {
    Params p;
    p.k = 1.0;
    p.kappa = kappa;
    const auto b = theorems::check_total_volume(ws, p).front();
    worst = std::max(worst, std::abs(b.rhs - vol) / vol);
    c.expect(std::abs(b.rhs - vol) <= 1e-6 * vol, fmt("kappa=%g rhs %.10f", kappa, b.rhs));
    c.expect(std::abs(b.lhs - vol) <= 1e-6 * vol, fmt("kappa=%g |N| %.10f", kappa, b.lhs));
    c.expect(b.verdict == Verdict::holds_at_equality, fmt("kappa=%g verdict %s", kappa, theorems::to_string(b.verdict).c_str()));
  }
  c.summary = fmt("kappa in {0.1, 1, 2, 10}: rhs = 2 pi^2 to %.1e relative", worst);
}

// ---------------------------------------------------------------- 10

std::string cli_output(std::vector<std::string> args) {
  args.insert(args.begin(), "riemlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return std::to_string(code) + "\n" + out.str() + err.str();
}

void determinism(Check& c) {
  const std::vector<std::vector<std::string>> runs = {
      {"check", "--manifold", "ellipsoid", "--theorem", "check_average_area", "--k", "0", "--r", "0.4", "--samples",
       "2000", "--seed", "7"},
      {"check", "--manifold", "sphere-3", "--theorem", "check_monotone", "--k", "0.5", "--r-grid", "0.5:2.5:5",
       "--samples", "500", "--seed", "3", "--format", "json"},
      {"sweep", "--manifold", "ellipsoid", "--k", "0", "--r-grid", "0.2:1:5", "--samples", "1000", "--seed", "5"},
  };
  int compared = 0;
  for (const auto& base : runs) {
    std::string reference;
    for (const char* threads : {"1", "2", "8", "1"}) {
      auto args = base;
      args.insert(args.end(), {"--threads", threads});
      const std::string out = cli_output(args);
      if (reference.empty())
        reference = out;
      else {
        c.expect(out == reference, "output differs at --threads " + std::string(threads) + " for " + base[2]);
        ++compared;
      }
    }
    c.expect(reference.rfind("0\n", 0) == 0, "run failed: " + reference.substr(0, 200));
  }
  // Fourth-order convergence of the Jacobian on S^3: error ratio when h halves.
  const auto s3 = catalog::make("sphere-3");
  const Mat g = metric_at(s3, s3.base_point);
  const UnitTangentSample smp{s3.base_point, orthonormal_basis(g) * Vec::Unit(3, 0), 1.0, 0};
  const double r = 2.5, exact = std::sin(r) * std::sin(r);
  std::vector<double> ratios;
  double previous = 0.0;
  for (int m : {16, 32, 64, 128}) {
    ShootOptions o;
    o.steps = m;
    const double err = std::abs(jacobian_F(shoot(s3, smp, r, o), r) - exact);
    if (previous > 0.0) ratios.push_back(previous / err);
    previous = err;
  }
  for (double q : ratios) c.expect(q >= 10.0 && q <= 24.0, fmt("error ratio %.2f", q));
  c.summary = fmt("%d byte comparisons identical; halving h divides the error by %.1f, %.1f, %.1f", compared,
                  ratios[0], ratios[1], ratios[2]);
}

// ---------------------------------------------------------------- 11

void gauss_bonnet(Check& c) {
  Workspace ws(catalog::make("ellipsoid"), RunSettings{0, 1, 0.0, 0});
  Params p;
  p.r = 0.3;
  const auto b = theorems::check_gauss_bonnet_2d(ws, p).front();
  c.expect(b.rhs == 1.0 / 0.3, fmt("rhs %.6f", b.rhs));
  c.expect(b.lhs <= 1.0 / 0.3 && b.margin > 3 * b.mc_stderr, fmt("min H %.6f margin %.3e se %.2e", b.lhs, b.margin, b.mc_stderr));
  c.expect(b.verdict == Verdict::holds, "verdict " + theorems::to_string(b.verdict));
  c.summary = fmt("min fiber-average H %.6f <= %.6f over %g points, margin %.3e (se %.1e)", b.lhs, b.rhs,
                  static_cast<double>(b.samples), b.margin, b.mc_stderr);
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  void (*fn)(Check&);
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "kernel exactness", 5, kernel_exactness},
      {2, "chord lemma", 5, chord_lemma},
      {3, "constant-curvature equality cases", 180, constant_curvature},
      {4, "conjugate radius on S^3 and T^3", 60, green},
      {5, "Liouville invariance", 120, liouville},
      {6, "strict inequality on the ellipsoid", 120, strict_inequality},
      {7, "small-ball volume coefficient", 60, taylor},
      {8, "S^2 x H^2 counterexample", 180, counterexample},
      {9, "total-volume equality on S^3", 10, total_volume},
      {10, "determinism and fourth-order convergence", 120, determinism},
      {11, "2D Gauss-Bonnet corollary", 60, gauss_bonnet},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.fn(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > cr.budget_s) c.failures.push_back(fmt("runtime %.1f s over the %.0f s budget", secs, cr.budget_s));
    const bool ok = c.failures.empty();
    failed += !ok;
    std::printf("%s criterion %2d %s: %s [%.1f s / %.0f s]\n", ok ? "PASS" : "FAIL", cr.id, cr.title, c.summary.c_str(),
                secs, cr.budget_s);
    for (const auto& f : c.failures) std::printf("     - %s\n", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
