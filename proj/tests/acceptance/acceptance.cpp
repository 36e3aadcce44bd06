// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "opshift/analytic_model.hpp"
#include "opshift/cli.hpp"
#include "opshift/equivalence.hpp"
#include "opshift/factory.hpp"
#include "opshift/structure.hpp"
#include "opshift/tree_bridge.hpp"
#include "support.hpp"

using namespace opshift;

namespace {

struct Check {
  bool ok = true;
  std::string detail;
};

double rel(const VectorXcd& got, const VectorXcd& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

std::vector<Family> moment_families() {
  std::vector<Family> fams;
  for (std::uint64_t seed = 0; seed < 20; ++seed) fams.push_back(random_commuting_family(2, 3, 5, seed));
  return fams;
}

std::vector<MultiIndex> betas(std::size_t d, int max_order) {
  std::vector<MultiIndex> out;
  for (const auto& b : TruncationBox(d, max_order)) out.push_back(b);
  return out;
}

Check moment_oracle() {
  std::mt19937_64 rng(1);
  double worst_b = 0.0, worst_c = 0.0;
  for (const auto& fam : moment_families()) {
    for (const auto& beta : betas(2, 3)) {
      const auto x = oracle::random_vector(fam, rng);
      const auto fast = apply_power(fam, beta, x);
      const auto slow = oracle::composed_power(fam, beta, x);
      const auto fast_c = apply_adjoint_power(fam, beta, x);
      const auto slow_c = oracle::composed_adjoint_power(fam, beta, x);
      for (std::size_t r = 0; r < fam.box().size(); ++r) {
        worst_b = std::max(worst_b, rel(fast.block(r), slow.block(r)));
        if (fam.box().contains(fam.box().unrank(r) + beta)) {
          worst_c = std::max(worst_c, rel(fast_c.block(r), slow_c.block(r)));
        }
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "max B residual %.2e, max C residual %.2e", worst_b, worst_c);
  return {worst_b <= 1e-10 && worst_c <= 1e-10, buf};
}

Check intertwining_recursion() {
  double worst = 0.0;
  for (const auto& fam : moment_families()) {
    for (std::size_t r = 0; r < fam.stored_count(); ++r) {
      const MultiIndex& alpha = fam.box().unrank(r);
      for (const auto& beta : fam.box()) {
        if (!alpha.dominates(beta)) continue;
        for (std::size_t j = 0; j < 2; ++j) {
          const MatrixXcd lhs = fam.weight(j, r) * moment_B(fam, alpha, beta).matrix;
          const MatrixXcd rhs = moment_B(fam, add_unit(alpha, j), add_unit(beta, j)).matrix;
          worst = std::max(worst, (lhs - rhs).norm() / std::max(1.0, rhs.norm()));
        }
      }
    }
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "max residual %.2e", worst);
  return {worst <= 1e-10, buf};
}

std::vector<Family> assorted_families() {
  std::vector<Family> fams = moment_families();
  for (std::size_t d = 1; d <= 3; ++d) fams.push_back(example33(d, 4));
  fams.push_back(diag_powers(2, 4, 2.0, 0.5));
  fams.push_back(remark34(2, 4, Remark34Convention::as_printed).family);
  fams.push_back(remark34(2, 4, Remark34Convention::model).family);
  fams.push_back(random_unilateral({1, 2, 3, 2}, 4));
  return fams;
}

Check normality() {
  int wrong = 0, tested = 0;
  for (const auto& fam : assorted_families()) {
    for (std::size_t j = 0; j < fam.dim(); ++j) {
      ++tested;
      if (normality_verdict(fam, j).is_zero) ++wrong;
    }
  }
  const auto zero = Family::zeros(TruncationBox(2, 4), FiberMap(2));
  for (std::size_t j = 0; j < 2; ++j) {
    ++tested;
    if (!normality_verdict(zero, j).is_zero) ++wrong;
  }
  return {wrong == 0, std::to_string(tested) + " axes checked, " + std::to_string(wrong) + " wrong"};
}

Check circularity() {
  const auto fam = example33(2, 5);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    worst = std::max(worst, circular_residual(fam, {std::polar(1.0, angle(rng)), std::polar(1.0, angle(rng))}));
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "max residual %.2e over 100 torus points", worst);
  return {worst <= 1e-12, buf};
}

// Span of T^alpha(ker T^*) computed from the assembled matrices alone.
Eigen::Index brute_force_wandering_rank(const Family& fam) {
  const Eigen::Index total = fam.layout().total();
  std::vector<MatrixXcd> t;
  MatrixXcd stacked(0, total);
  for (std::size_t j = 0; j < fam.dim(); ++j) {
    t.push_back(assemble_matrix(fam, j));
    MatrixXcd next(stacked.rows() + total, total);
    next << stacked, t.back().adjoint();
    stacked = next;
  }
  Eigen::FullPivLU<MatrixXcd> lu(stacked);
  lu.setThreshold(1e-10);
  const MatrixXcd kernel = lu.kernel();
  MatrixXcd columns(total, 0);
  for (const auto& alpha : fam.box()) {
    MatrixXcd img = kernel;
    for (std::size_t j = 0; j < fam.dim(); ++j) img = oracle::matrix_power(t[j], alpha[j]) * img;
    MatrixXcd next(total, columns.cols() + img.cols());
    next << columns, img;
    columns = next;
  }
  Eigen::FullPivLU<MatrixXcd> span(columns);
  span.setThreshold(1e-10);
  return span.rank();
}

Check wandering() {
  std::vector<Family> fams;
  for (std::uint64_t seed = 0; seed < 5; ++seed) fams.push_back(random_commuting_family(2, 2, 3, seed));
  fams.push_back(example33(2, 3));
  fams.push_back(diag_powers(2, 3, 2.0, 0.5));
  fams.push_back(remark34(2, 3, Remark34Convention::model).family);
  const auto full = random_unilateral({2, 2, 2, 2}, 6);
  MatrixXcd rank1 = full.weight(0, MultiIndex{1});
  rank1.col(1) = rank1.col(0);
  fams.push_back(full.with_weight(0, MultiIndex{1}, rank1));
  int bad = 0;
  for (const auto& fam : fams) {
    const auto rep = wandering_span_dim(fam);
    if (!rep.full() || brute_force_wandering_rank(fam) != rep.total_dim) ++bad;
  }
  return {bad == 0, std::to_string(fams.size()) + " families incl. one rank-deficient weight, " +
                        std::to_string(bad) + " short of D"};
}

Check example33_classification() {
  bool ok = true;
  double value = 0.0;
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto c = classify(example33_spec(d), 6);
    ok = ok && c.row_contraction.holds && c.joint_contraction.holds == (d == 1);
    ok = ok && c.row_contraction.paths_agree && c.joint_contraction.paths_agree;
    if (d == 2) {
      bool found = false;
      for (const auto& v : c.joint_contraction.violations) {
        if (v.alpha == MultiIndex{1, 0}) {
          found = true;
          value = v.value;
        }
      }
      ok = ok && found && std::abs(value - 3.0 / (2.0 * std::sqrt(2.0))) <= 1e-10;
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "d=2 witness value at (1,0): %.12f", value);
  return {ok, buf};
}

Check strict_inclusion() {
  bool ok = true;
  double s = 0.0;
  for (std::size_t d = 1; d <= 2; ++d) {
    const auto gram = build_gram(diag_powers(d, 25, 2.0, 0.5));
    const std::vector<cd> w(d, 1.0);
    ok = ok && pointspec_test(gram, w).status == PointSpecStatus::in_point_spectrum;
    ok = ok && bpe_test(gram, w).series.classification == SeriesClass::not_bpe;
    if (d == 1) {
      BpePolicy p;
      p.max_layer = 25;
      s = direction_series(gram, w, VectorXcd::Unit(2, 0), p).s_last;
      ok = ok && std::abs(s - 4.0 / 3.0) <= 1e-6;
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "convergent direction S_25 = %.15f", s);
  return {ok, buf};
}

Check diagonal_intersection() {
  const auto gram = build_gram(diag_powers(1, 60, 0.5, 2.0));
  std::vector<double> radii;
  for (int k = 1; k <= 30; ++k) radii.push_back(0.05 * k);
  const auto scan = bpe_grid_scan(gram, radii, {{1.0}});
  int oracle_mismatch = 0;
  for (const auto& row : scan.rows) {
    const auto c = row.verdict.series.classification;
    if (c == SeriesClass::inconclusive) continue;
    const double r = std::abs(row.verdict.w[0]);
    // Constant scalar weights c give a geometric series with ratio (r / |c|)^2.
    const bool converges = r < 0.5 && r < 2.0;
    if ((c == SeriesClass::bpe) != converges) ++oracle_mismatch;
  }
  return {scan.diagonal && scan.disagreements == 0 && scan.inconclusive <= 2 && oracle_mismatch == 0,
          std::to_string(scan.disagreements) + " disagreements, " + std::to_string(scan.inconclusive) +
              " inconclusive, " + std::to_string(oracle_mismatch) + " oracle mismatches"};
}

Check duality_and_eigenvectors() {
  std::vector<Family> fams;
  for (std::uint64_t seed = 0; seed < 3; ++seed) fams.push_back(random_commuting_family(2, 3, 4, seed));
  fams.push_back(remark34(2, 4, Remark34Convention::model).family);
  fams.push_back(diag_powers(2, 4, 2.0, 0.5));
  std::mt19937_64 rng(7);
  double worst_dual = 0.0, worst_eig = 0.0;
  for (const auto& fam : fams) {
    const auto gram = build_gram(fam);
    const Eigen::Index inner = fam.layout().offset(fam.stored_count());
    for (int k = 0; k < 50; ++k) {
      auto f = oracle::random_vector(fam, rng);
      f.data().tail(f.data().size() - inner).setZero();
      const auto g = oracle::random_vector(fam, rng);
      for (std::size_t j = 0; j < fam.dim(); ++j) {
        const cd lhs = h2_inner(gram, mz_apply(fam, j, f), g);
        const cd rhs = h2_inner(gram, f, mz_adjoint_apply(fam, gram, j, g));
        worst_dual = std::max(worst_dual, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      }
    }
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int k = 0; k < 5; ++k) {
      const std::vector<cd> w{{u(rng), u(rng)}, {u(rng), u(rng)}};
      const VectorXcd x = random_gaussian(gram.fiber_dim(), 1, rng).col(0);
      worst_eig = std::max(worst_eig, eigenvector_residual(fam, gram, w, eigenvector_build(fam, gram, w, x)));
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "duality %.2e, eigenvector residual %.2e", worst_dual, worst_eig);
  return {worst_dual <= 1e-10 && worst_eig <= 1e-9, buf};
}

Check unitary_equivalence() {
  int equivalent = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed + 500);
    const int n = 2 + static_cast<int>(seed % 3);
    const auto a = random_commuting_family(2, n, 4, seed + 100);
    const auto v = decide(a, conjugate(a, random_unitary(n, rng)));
    if (v.status == EquivalenceStatus::equivalent && v.intertwining_residual <= 1e-9 &&
        v.unitarity_residual <= 1e-10) {
      ++equivalent;
      worst = std::max(worst, v.intertwining_residual);
    }
  }
  const auto neg = decide(diag_powers(2, 4, 2.0, 0.5), diag_powers(2, 4, 2.0, 1.0 / 3.0));
  const bool neg_ok = neg.status == EquivalenceStatus::not_equivalent && neg.witness && neg.witness->order() == 1;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d/50 conjugated pairs equivalent (max residual %.2e), spectral witness %s",
                equivalent, worst, neg_ok ? neg.witness->to_string().c_str() : "missing");
  return {equivalent == 50 && neg_ok, buf};
}

Check tree_round_trip() {
  const TreeProduct product({RootedTree::chain(3), RootedTree::binary(2)});
  const auto emb = embed(product, commuting_tree_weights(product, 5), 2);
  const auto com = check_commuting(emb.family);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ex = oracle::branching_example(seed);
    const auto res = decompose_unilateral(ex.family, ex.bases, ex.partitions);
    if (!std::holds_alternative<Forest>(res)) return {false, "decomposition not applicable"};
    const auto re = reassemble(std::get<Forest>(res), ex.bases);
    for (int n = 0; n < ex.family.cap(); ++n) {
      const MatrixXcd back = re.maps[n + 1] * re.family.weight(0, MultiIndex{n}) * re.maps[n].adjoint();
      worst = std::max(worst, linalg::op_norm(back - ex.family.weight(0, MultiIndex{n})));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "embedding residual %.2e, commuting %.2e, reassembly %.2e",
                emb.intertwining_residual, com.worst_residual, worst);
  return {emb.intertwining_residual == 0.0 && com.commuting && worst <= 1e-10, buf};
}

Check kernel_positivity() {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  double lowest = 1e300;
  for (const auto& fam : {remark34(2, 8, Remark34Convention::model).family,
                          remark34(2, 8, Remark34Convention::as_printed).family,
                          diag_powers(2, 8, 2.0, 0.5)}) {
    const auto gram = build_gram(fam);
    std::vector<std::vector<cd>> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({{u(rng), u(rng)}, {u(rng), u(rng)}});
    const Eigen::Index n = gram.fiber_dim();
    MatrixXcd big(5 * n, 5 * n);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) big.block(i * n, j * n, n, n) = kernel_eval(gram, pts[i], pts[j]).value;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(linalg::hermitian_part(big));
    lowest = std::min(lowest, es.eigenvalues()(0));
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "smallest eigenvalue %.3e", lowest);
  return {lowest >= -1e-10, buf};
}

Check determinism() {
  const std::string dir = std::filesystem::temp_directory_path().string() + "/opshift_acceptance";
  std::filesystem::create_directories(dir);
  const std::string a = dir + "/a.json", b = dir + "/b.json", t = dir + "/t.json";
  std::mt19937_64 rng(3);
  std::ofstream(a) << to_json(random_commuting_family(2, 3, 4, 21));
  std::ofstream(b) << to_json(conjugate(random_commuting_family(2, 3, 4, 21), random_unitary(3, rng)));
  std::ofstream(t) << R"({"trees": [{"parent": [null, 0, 1]}, {"parent": [null, 0, 0, 1, 1, 2, 2]}]})";
  const std::vector<std::vector<std::string>> commands{
      {"gen-example", "remark34", "--d", "2", "--degree-cap", "5"},
      {"validate", a},
      {"moments", a, "--alpha", "2,1", "--beta", "1,1"},
      {"props", a, "--seed", "9"},
      {"kernel", a, "--z", "0.1,0.2,-0.1,0", "--w", "0.2,0,0,0.1"},
      {"bpe", a, "--w", "0.3,0,0.1,0.1"},
      {"bpe", a, "--radii", "0.1,0.2,0.4,0.8"},
      {"equiv", a, "--b", b, "--verify-intertwine", "--seed", "5"},
      {"embed-tree", t, "--random-weights", "--seed", "2"},
  };
  int differing = 0, failed = 0;
  for (auto cmd : commands) {
    if (cmd[0] == "equiv") cmd.insert(cmd.begin() + 1, "--a");
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      std::ostringstream out, err;
      if (cli::run(cmd, out, err) != 0) ++failed;
      if (rep == 0) first = out.str();
      else if (out.str() != first || first.empty()) ++differing;
    }
  }
  std::filesystem::remove_all(dir);
  return {differing == 0 && failed == 0, std::to_string(commands.size()) + " commands run twice, " +
                                             std::to_string(differing) + " differing, " +
                                             std::to_string(failed) + " failed"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"moment formulas match composed shifts", moment_oracle},
      {"weight times moment recursion", intertwining_recursion},
      {"normality only for the zero family", normality},
      {"circular conjugation identity", circularity},
      {"wandering subspace spans the truncation", wandering},
      {"2x2 example contraction classes", example33_classification},
      {"point spectrum strictly contains bpe points", strict_inclusion},
      {"diagonal bpe grid equals component intersection", diagonal_intersection},
      {"multiplication adjoint duality and eigenvectors", duality_and_eigenvectors},
      {"unitary equivalence decisions", unitary_equivalence},
      {"tree embedding and decomposition round trip", tree_round_trip},
      {"kernel Gram matrices are positive", kernel_positivity},
      {"CLI output is byte-identical across runs", determinism},
  };
  int failures = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c = {false, std::string("exception: ") + e.what()};
    }
    if (!c.ok) ++failures;
    std::printf("%s %2zu %s: %s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), c.detail.c_str());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria failed (%.1f s)\n", failures, criteria.size(), secs);
  return failures == 0 ? 0 : 1;
}
