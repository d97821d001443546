// One line per criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "suffreduce/estimators.hpp"
#include "suffreduce/linkage.hpp"
#include "suffreduce/orbit.hpp"
#include "suffreduce/reduce.hpp"
#include "suffreduce/verify.hpp"

using namespace suffreduce;

namespace {

constexpr std::uint64_t kSeed = 20261016;
constexpr std::size_t kBattery = 50;
constexpr std::size_t kGrid = 10;
// Fantope ADMM crawls on degenerate faces before it locks in.
constexpr std::size_t kFantopeIter = 400000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Instance {
  SymMatrix x;
  Vector grid;
};

// Sizes cycle through 10, 20, 30.
std::vector<Instance> covariance_battery() {
  std::mt19937_64 rng(kSeed);
  std::vector<Instance> out;
  for (std::size_t t = 0; t < kBattery; ++t) {
    InstanceOptions io;
    io.p = 10 * (1 + t % 3);
    io.blocks = 2 + t % 4;
    SymMatrix x = random_covariance(rng, io);
    Vector grid = lambda_grid(x, kGrid);
    out.push_back({std::move(x), std::move(grid)});
  }
  return out;
}

std::vector<Instance> ising_battery() {
  std::mt19937_64 rng(kSeed + 1);
  std::vector<Instance> out;
  for (std::size_t t = 0; t < kBattery; ++t) {
    InstanceOptions io;
    io.p = 4 + 2 * (t % 3);
    io.blocks = 2;
    SymMatrix x = random_sign_moments(rng, io);
    Vector grid = lambda_grid(x, kGrid);
    out.push_back({std::move(x), std::move(grid)});
  }
  return out;
}

Partition support_components(const SolveReport& r) { return components_above(std::get<SymMatrix>(r.support), 0.5); }

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome exact_thresholding(const std::vector<Instance>& battery) {
  std::size_t solves = 0, mismatches = 0, unconverged = 0;
  for (const Instance& in : battery)
    for (double lam : in.grid) {
      const SolveReport r = solve(EstimatorSpec::graphical_lasso(lam), in.x);
      ++solves;
      if (!r.converged) ++unconverged;
      if (support_components(r) != threshold_components(in.x, lam)) ++mismatches;
    }
  return {mismatches == 0 && unconverged == 0, std::to_string(solves) + " solves, " + std::to_string(mismatches) +
                                                   " mismatches, " + std::to_string(unconverged) + " unconverged"};
}

Outcome sufficiency(const std::vector<Instance>& battery, const std::vector<Instance>& ising) {
  double worst = 0.0;
  std::size_t checks = 0, failed = 0;
  auto check = [&](const EstimatorSpec& spec, const SymMatrix& x) {
    const SufficiencyReport r = check_sufficiency(spec, x, kEqualityTol);
    ++checks;
    worst = std::max(worst, r.max_deviation);
    if (!r.pass || r.max_deviation > kEqualityTol) ++failed;
  };
  for (const Instance& in : battery) {
    for (double lam : in.grid) {
      check(EstimatorSpec::graphical_lasso(lam), in.x);
      check(EstimatorSpec::sparse_covariance(lam, 0.01), in.x);
    }
    check(EstimatorSpec::positive_invcov(), in.x);
  }
  for (const Instance& in : ising)
    for (double lam : in.grid) check(EstimatorSpec::ising(lam), in.x);
  return {failed == 0, std::to_string(checks) + " checks, " + std::to_string(failed) + " failed, worst deviation " +
                           fmt("%.2e", worst)};
}

Outcome fantope_containment(const std::vector<Instance>& battery) {
  double worst = 0.0;
  std::size_t solves = 0, unconverged = 0;
  for (const Instance& in : battery)
    for (std::size_t k : {1, 2})
      for (double lam : in.grid) {
        EstimatorSpec spec = EstimatorSpec::fantope_spca(lam, k);
        spec.options.max_iter = kFantopeIter;
        const SolveReport r = solve(spec, in.x);
        ++solves;
        if (!r.converged) ++unconverged;
        const SymMatrix& t = r.matrix();
        const double scale = max_abs(t);
        const Partition part = threshold_components(in.x, lam);
        for (std::size_t i = 0; i < t.dim(); ++i)
          for (std::size_t j = i + 1; j < t.dim(); ++j)
            if (!part.same_block(i, j) && scale > 0.0) worst = std::max(worst, std::abs(t(i, j)) / scale);
      }
  return {worst <= kContainmentTol && unconverged == 0, std::to_string(solves) + " solves, " +
                                                             std::to_string(unconverged) +
                                                             " unconverged, worst relative off-block " +
                                                             fmt("%.2e", worst)};
}

Outcome minimality() {
  std::mt19937_64 rng(kSeed + 2);
  std::uniform_real_distribution<double> u(-1.0, 1.0), l(0.0, 1.0);
  std::size_t bad = 0, total = 0;
  for (std::size_t p = 3; p <= 5; ++p)
    for (int t = 0; t < 20; ++t) {
      SymMatrix x(p);
      for (double& a : x.packed()) a = u(rng);
      ++total;
      if (!check_minimality_slc(x, l(rng))) ++bad;
    }
  return {bad == 0, std::to_string(total) + " pairs, " + std::to_string(bad) + " failures"};
}

Outcome ultrametric_psd() {
  std::size_t mismatches = 0, total = 0;
  for (std::size_t bits = 0; bits < 64; ++bits) {
    SymMatrix b = SymMatrix::identity(4);
    std::size_t e = 0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j, ++e) b(i, j) = ((bits >> e) & 1U) ? 1.0 : 0.0;
    ++total;
    if (!ultrametric_psd_agree(b, 1e-10)) ++mismatches;
  }
  std::mt19937_64 rng(kSeed + 3);
  std::bernoulli_distribution coin(0.5);
  for (int t = 0; t < 200; ++t) {
    SymMatrix b = SymMatrix::identity(6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = i + 1; j < 6; ++j) b(i, j) = coin(rng) ? 1.0 : 0.0;
    ++total;
    if (!ultrametric_psd_agree(b, 1e-10)) ++mismatches;
  }
  return {mismatches == 0, std::to_string(total) + " matrices, " + std::to_string(mismatches) + " mismatches"};
}

Outcome arcsin_in_cut() {
  std::mt19937_64 rng(kSeed + 4);
  std::size_t outside = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t p = 2 + t % 5;
    if (!cut_membership(arcsin_map(random_correlation(rng, p)))) ++outside;
  }
  return {outside == 0, "100 matrices, " + std::to_string(outside) + " outside"};
}

bool within_ulps(const Vector& a, const Vector& b, int n) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double lo = b[i], hi = b[i];
    for (int s = 0; s < n; ++s) {
      lo = std::nextafter(lo, -INFINITY);
      hi = std::nextafter(hi, INFINITY);
    }
    if (!(a[i] >= lo && a[i] <= hi)) return false;
  }
  return true;
}

Outcome closed_form_chains() {
  std::mt19937_64 rng(kSeed + 5);
  std::uniform_int_distribution<int> len(1, 20), dy(-4096, 4096);
  std::normal_distribution<double> g(0.0, 2.0);
  std::uniform_real_distribution<double> lam(0.0, 1.5);
  std::size_t exact_bad = 0, general_bad = 0, nnls_bad = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = len(rng);
    // Dyadic inputs and thresholds make every subtraction exact.
    Vector xd(n), ld(n), xg(n), lg(n);
    for (std::size_t i = 0; i < n; ++i) {
      xd[i] = dy(rng) / 1024.0;
      ld[i] = std::abs(dy(rng)) / 2048.0;
      xg[i] = g(rng);
      lg[i] = lam(rng);
    }
    const Vector sd = lasso(xd, ld), hd = hard_threshold(xd, ld);
    if (reconstruct_from_soft(sd, ld) != hd || lasso(hd, ld) != sd) ++exact_bad;
    const Vector sg = lasso(xg, lg), hg = hard_threshold(xg, lg);
    if (!within_ulps(reconstruct_from_soft(sg, lg), hg, 2) || lasso(hg, lg) != sg) ++general_bad;
    if (nnls(xg) != positive_part(xg) || nnls(xd) != positive_part(xd)) ++nnls_bad;
  }
  return {exact_bad == 0 && general_bad == 0 && nnls_bad == 0,
          "10000 vectors; dyadic bitwise failures " + std::to_string(exact_bad) + ", general (2 ulp) failures " +
              std::to_string(general_bad) + ", nnls failures " + std::to_string(nnls_bad)};
}

Outcome ising_oracle() {
  std::mt19937_64 rng(kSeed + 6);
  std::normal_distribution<double> g(0.0, 0.6);
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t p = 2; p <= 6; ++p)
    for (int rep = 0; rep < 4; ++rep) {
      SymMatrix t(p);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) t(i, j) = g(rng);
      const SymMatrix m = ising_logpartition(t).moment;
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
          SymMatrix up = t, dn = t;
          up(i, j) += h;
          dn(i, j) -= h;
          // The packed cell (i,j) stands for both symmetric entries.
          const double fd = (ising_logpartition(up).value - ising_logpartition(dn).value) / (4 * h);
          worst = std::max(worst, std::abs(fd - m(i, j)));
        }
    }
  SymMatrix x = SymMatrix::identity(2);
  x(0, 1) = 0.5;
  const SolveReport r = ising_pmle(x, 0.0);
  const double err = std::abs(r.matrix()(0, 1) - std::atanh(0.5) / 2);
  return {worst <= 1e-6 && err <= 1e-8 && r.converged,
          "gradient error " + fmt("%.2e", worst) + ", pair stationary error " + fmt("%.2e", err)};
}

Outcome decomposition_bench() {
  const BenchResult b = bench_decomposition(200, 10, 0.0, kSeed, 1);
  std::ofstream("bench.json") << to_json(b) << "\n";
  const bool exact = b.deviation <= kEqualityTol && b.direct_converged && b.decomposed_converged;
  const bool fast = b.speedup >= 3.0;
  return {exact, "deviation " + fmt("%.2e", b.deviation) + ", " + std::to_string(b.found_blocks) + " blocks, speedup " +
                     fmt("%.1fx", b.speedup) + (fast ? " (>= 3x)" : " (below 3x, soft gate)")};
}

Outcome two_communities() {
  const std::size_t p = 40, half = 20;
  SymMatrix x(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) x(i, j) = i == j ? 1.0 : ((i < half) == (j < half) ? 0.6 : 0.05);
  const double lam = 0.3;
  std::vector<std::size_t> labels(p);
  for (std::size_t i = 0; i < p; ++i) labels[i] = i < half ? 0 : 1;
  const Partition planted = Partition::from_labels(labels);

  const Partition a = components_above(slc(abs(x), lam), 0.5);
  const SolveReport gl = solve(EstimatorSpec::graphical_lasso(lam), x);
  EstimatorSpec fs = EstimatorSpec::fantope_spca(lam, 2);
  fs.options.max_iter = kFantopeIter;
  const SolveReport fp = solve(fs, x);
  const Partition b = support_components(gl), c = support_components(fp);
  const bool ok = a == planted && b == planted && c == planted && gl.converged && fp.converged;
  return {ok, "blocks: slc " + std::to_string(a.block_count()) + ", glasso " + std::to_string(b.block_count()) +
                  ", fantope " + std::to_string(c.block_count())};
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

} // namespace

int main() {
  const std::vector<Instance> battery = covariance_battery();
  const std::vector<Instance> ising = ising_battery();

  const std::vector<Criterion> criteria{
      {"exact thresholding", 120, [&] { return exact_thresholding(battery); }},
      {"sufficiency equivalence", 300, [&] { return sufficiency(battery, ising); }},
      {"fantope support containment", 120, [&] { return fantope_containment(battery); }},
      {"slc minimality", 60, minimality},
      {"ultrametric iff psd", 10, ultrametric_psd},
      {"arcsin in cut polytope", 60, arcsin_in_cut},
      {"closed-form chains", 5, closed_form_chains},
      {"ising oracle", 30, ising_oracle},
      {"decomposition benchmark", 0, decomposition_bench},
      {"two-community structure", 60, two_communities},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = c.budget_seconds <= 0 || secs <= c.budget_seconds;
    const bool pass = o.pass && in_budget;
    if (!pass) ++failures;
    std::printf("%s %2zu %-28s %s [%.1fs%s]\n", pass ? "PASS" : "FAIL", i + 1, c.name, o.detail.c_str(), secs,
                in_budget ? "" : fmt(", budget %.0fs exceeded", c.budget_seconds).c_str());
    std::fflush(stdout);
  }
  return failures;
}
