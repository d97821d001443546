#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "suffreduce/error.hpp"
#include "suffreduce/estimators.hpp"
#include "suffreduce/io.hpp"
#include "suffreduce/linkage.hpp"
#include "suffreduce/reduce.hpp"
#include "suffreduce/verify.hpp"

namespace fs = std::filesystem;
using namespace suffreduce;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kSolverFailed = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

template <class M>
std::string csv_text(const M& m) {
  std::ostringstream s;
  write_csv(s, m);
  return s.str();
}

fs::path prepare_dir(const std::string& dir) {
  fs::path d(dir);
  std::error_code ec;
  fs::create_directories(d, ec);
  if (!fs::is_directory(d)) throw UsageError("cannot create output directory " + dir);
  return d;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError("no such file: " + path);
}

SymMatrix read_symmetric(const std::string& path, bool header, double asym_tol) {
  require_file(path);
  return from_dense(read_csv_file(path, header), asym_tol);
}

// One row or one column.
Vector read_vector(const std::string& path, bool header) {
  require_file(path);
  const Matrix m = read_csv_file(path, header);
  if (m.rows() != 1 && m.cols() != 1) throw InvalidArgument("expected a single row or column of values");
  Vector v;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) v.push_back(m(i, j));
  return v;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != item.size() || v < 2) throw UsageError("--sizes wants integers >= 2, got '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--sizes is empty");
  return out;
}

struct CovArgs {
  std::string input, output;
  bool general = false, header = false;
};

int run_cov(const CovArgs& a) {
  require_file(a.input);
  std::ifstream in(a.input);
  const Matrix obs = a.general ? read_csv(in, a.header) : read_votes_csv(in, a.header);
  write_text(a.output, csv_text(uncentered_covariance(obs)));
  return kOk;
}

struct ClusterArgs {
  std::string input, out_dir = ".";
  std::optional<double> lambda;
  bool header = false;
  double asym_tol = 1e-9;
};

int run_cluster(const ClusterArgs& a) {
  const SymMatrix x = read_symmetric(a.input, a.header, a.asym_tol);
  if (a.lambda && !(*a.lambda >= 0.0)) throw InvalidArgument("--lambda must be non-negative");
  const fs::path dir = prepare_dir(a.out_dir);
  const Dendrogram d = mst_kruskal(x);
  write_text((dir / "dendrogram.json").string(), dendrogram_to_json(d));
  if (a.lambda) write_text((dir / "clusters.csv").string(), csv_text(cut_dendrogram(d, *a.lambda).cluster_matrix()));
  return kOk;
}

struct ThresholdArgs {
  std::string input, out_dir = ".";
  double lambda = 0.0;
  bool positive = false, header = false;
  double asym_tol = 1e-9;
};

int run_threshold(const ThresholdArgs& a) {
  const SymMatrix x = read_symmetric(a.input, a.header, a.asym_tol);
  const PenaltySpec pen = a.positive ? PenaltySpec::offdiag_positivity() : PenaltySpec::symmetric_l1(a.lambda);
  const ReducedProblem r = reduce_input(pen, Group::DiagonalConjugation, x);
  const fs::path dir = prepare_dir(a.out_dir);
  write_text((dir / "reduced.csv").string(), csv_text(std::get<SymMatrix>(r.reduced)));
  write_text((dir / "components.json").string(), partition_to_json(r.partition));
  return kOk;
}

struct SolveArgs {
  std::string input, out_dir = ".", estimator, decompose = "off";
  std::optional<double> lambda;
  std::size_t k = 1;
  double eps = 0.01;
  bool penalize_diagonal = false, header = false;
  double asym_tol = 1e-9;
  SolverOptions options;
  std::size_t threads = 0;
};

EstimatorSpec make_spec(const SolveArgs& a) {
  const auto fam = family_from_string(a.estimator);
  if (!fam) throw UsageError("unknown estimator '" + a.estimator + "'");
  const bool needs_lambda = *fam != Family::NNLS && *fam != Family::PositiveInvCov;
  if (needs_lambda && !a.lambda) throw UsageError("--lambda is required for " + a.estimator);
  const double lam = a.lambda.value_or(0.0);
  EstimatorSpec spec;
  switch (*fam) {
    case Family::Lasso: spec = EstimatorSpec::lasso(lam); break;
    case Family::NNLS: spec = EstimatorSpec::nnls(); break;
    case Family::GraphicalLasso: spec = EstimatorSpec::graphical_lasso(lam, a.penalize_diagonal); break;
    case Family::FantopeSPCA: spec = EstimatorSpec::fantope_spca(lam, a.k); break;
    case Family::SparseCovariance: spec = EstimatorSpec::sparse_covariance(lam, a.eps); break;
    case Family::PositiveInvCov: spec = EstimatorSpec::positive_invcov(); break;
    case Family::IsingPMLE: spec = EstimatorSpec::ising(lam); break;
  }
  spec.options = a.options;
  spec.validate();
  return spec;
}

int run_solve(const SolveArgs& a) {
  const EstimatorSpec spec = make_spec(a);
  const bool split = a.decompose == "on";
  SolveReport rep;
  if (spec.symmetric()) {
    const SymMatrix x = read_symmetric(a.input, a.header, a.asym_tol);
    rep = split ? solve_decomposed(spec, x, a.threads) : solve(spec, x);
  } else {
    if (split) throw UsageError("--decompose on needs a symmetric-matrix estimator");
    rep = solve(spec, read_vector(a.input, a.header));
  }
  const fs::path dir = prepare_dir(a.out_dir);
  const std::string est = spec.symmetric() ? csv_text(rep.matrix()) : csv_text(rep.vector());
  write_text((dir / "estimate.csv").string(), est);
  write_text((dir / "report.json").string(), to_json(rep, spec));
  if (!rep.converged) {
    std::cerr << "suffreduce: solver did not converge (kkt residual " << rep.kkt_residual << " after "
              << rep.iterations << " iterations)\n";
    return kSolverFailed;
  }
  return kOk;
}

struct VerifyArgs {
  std::string suite = "all", sizes, output;
  std::uint64_t seed = 0;
};

int run_verify(const VerifyArgs& a) {
  SuiteOptions o;
  o.seed = a.seed;
  if (a.suite == "all") o.suites = {"sufficiency", "minimality", "orbitope"};
  else if (a.suite == "sufficiency" || a.suite == "minimality" || a.suite == "orbitope" || a.suite == "corrupted")
    o.suites = {a.suite};
  else throw UsageError("unknown suite '" + a.suite + "'");
  if (!a.sizes.empty()) o.sizes = parse_sizes(a.sizes);
  const SuiteSummary s = run_suite(o);
  write_text(a.output, to_json(s));
  if (!s.ok()) {
    std::cerr << "suffreduce: " << s.failures.size() << " of " << s.trials << " trials failed\n";
    return kVerifyFailed;
  }
  return kOk;
}

struct BenchArgs {
  std::string estimator = "glasso", output;
  std::size_t p = 200, blocks = 10, threads = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

int run_bench(const BenchArgs& a) {
  if (a.estimator != "glasso") throw UsageError("bench supports --estimator glasso only");
  if (a.blocks == 0 || a.blocks > a.p) throw UsageError("--blocks must lie in 1..p");
  const BenchResult r = bench_decomposition(a.p, a.blocks, a.lambda, a.seed, a.threads);
  write_text(a.output, to_json(r));
  return r.direct_converged && r.decomposed_converged ? kOk : kSolverFailed;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Computationally sufficient reductions for penalized M-estimators"};
  app.require_subcommand(1, 1);

  CovArgs cov;
  auto* c = app.add_subcommand("cov", "uncentered covariance of a vote (or --general) table");
  c->add_option("input", cov.input, "observations CSV, one row per observation")->required();
  c->add_option("-o,--output", cov.output, "output CSV (default stdout)");
  c->add_flag("--general", cov.general, "accept arbitrary reals instead of -1/0/1 votes");
  c->add_flag("--header", cov.header, "skip the first line");

  ClusterArgs cl;
  auto* k = app.add_subcommand("cluster", "single-linkage dendrogram and clusters at a cut");
  k->add_option("input", cl.input, "symmetric matrix CSV")->required();
  k->add_option("--lambda", cl.lambda, "cut height; clusters.csv is written only when given");
  k->add_option("--out-dir", cl.out_dir, "directory for dendrogram.json and clusters.csv");
  k->add_option("--asym-tol", cl.asym_tol, "largest tolerated |x_ij - x_ji|");
  k->add_flag("--header", cl.header, "skip the first line");

  ThresholdArgs th;
  auto* t = app.add_subcommand("threshold", "single-linkage thresholding SLT_lambda(X)");
  t->add_option("input", th.input, "symmetric matrix CSV")->required();
  auto* tl = t->add_option("--lambda", th.lambda, "threshold level");
  t->add_flag("--positive", th.positive, "link only through positive entries (SLT_+)")->excludes(tl);
  t->add_option("--out-dir", th.out_dir, "directory for reduced.csv and components.json");
  t->add_option("--asym-tol", th.asym_tol, "largest tolerated |x_ij - x_ji|");
  t->add_flag("--header", th.header, "skip the first line");

  SolveArgs sv;
  auto* s = app.add_subcommand("solve", "solve one estimator, optionally block by block");
  s->add_option("input", sv.input, "symmetric matrix CSV (a single row or column for lasso/nnls)")->required();
  s->add_option("--estimator", sv.estimator, "lasso, nnls, glasso, fps, sparse_cov, posinvcov or ising")
      ->required();
  s->add_option("--lambda", sv.lambda, "penalty level");
  s->add_option("--k", sv.k, "Fantope rank for fps");
  s->add_option("--eps", sv.eps, "eigenvalue floor for sparse_cov");
  s->add_option("--decompose", sv.decompose, "solve connected blocks separately")
      ->check(CLI::IsMember({"on", "off"}));
  s->add_flag("--penalize-diagonal", sv.penalize_diagonal, "glasso: penalize the diagonal as well");
  s->add_option("--tol", sv.options.tol, "scaled KKT tolerance");
  s->add_option("--max-iter", sv.options.max_iter, "iteration budget");
  s->add_option("--threads", sv.threads, "worker threads for --decompose on (default SUFFREDUCE_THREADS)");
  s->add_option("--out-dir", sv.out_dir, "directory for estimate.csv and report.json");
  s->add_option("--asym-tol", sv.asym_tol, "largest tolerated |x_ij - x_ji|");
  s->add_flag("--header", sv.header, "skip the first line");

  VerifyArgs vf;
  auto* v = app.add_subcommand("verify", "run the verification suites");
  v->add_option("--suite", vf.suite, "sufficiency, minimality, orbitope, corrupted or all");
  v->add_option("--seed", vf.seed, "random seed");
  v->add_option("--sizes", vf.sizes, "comma-separated dimensions, e.g. 5,10,20");
  v->add_option("-o,--output", vf.output, "summary JSON (default stdout)");

  BenchArgs bn;
  auto* b = app.add_subcommand("bench", "decomposed vs direct solve on planted blocks");
  b->add_option("--estimator", bn.estimator, "glasso");
  b->add_option("--p", bn.p, "dimension");
  b->add_option("--blocks", bn.blocks, "planted blocks");
  b->add_option("--lambda", bn.lambda, "penalty level; 0 picks the separating level");
  b->add_option("--seed", bn.seed, "random seed");
  b->add_option("--threads", bn.threads, "worker threads for the decomposed solve");
  b->add_option("-o,--output", bn.output, "bench JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*c) return run_cov(cov);
    if (*k) return run_cluster(cl);
    if (*t) return run_threshold(th);
    if (*s) return run_solve(sv);
    if (*v) return run_verify(vf);
    if (*b) return run_bench(bn);
  } catch (const UsageError& e) {
    std::cerr << "suffreduce: " << e.what() << '\n';
    return kUsage;
  } catch (const LimitExceeded& e) {
    std::cerr << "suffreduce: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "suffreduce: " << e.what() << '\n';
    return kUsage;
  } catch (const NoSolution& e) {
    std::cerr << "suffreduce: no solution: " << e.what() << '\n';
    return kSolverFailed;
  } catch (const ConvergenceError& e) {
    std::cerr << "suffreduce: " << e.what() << '\n';
    return kSolverFailed;
  } catch (const std::exception& e) {
    std::cerr << "suffreduce: " << e.what() << '\n';
    return kSolverFailed;
  }
  return kUsage;
}
