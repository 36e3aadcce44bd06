#include "opshift/cli.hpp"

#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "opshift/analytic_model.hpp"
#include "opshift/equivalence.hpp"
#include "opshift/errors.hpp"
#include "opshift/factory.hpp"
#include "opshift/structure.hpp"

namespace opshift::cli {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

json optional_index(const std::optional<MultiIndex>& a) {
  return a ? to_json_value(*a) : json(nullptr);
}

std::vector<cd> complex_list(const std::vector<double>& v, std::size_t d, const std::string& flag) {
  if (v.size() != 2 * d) {
    throw UsageError(flag + " expects " + std::to_string(2 * d) + " numbers (re,im per axis)");
  }
  std::vector<cd> out;
  for (std::size_t j = 0; j < d; ++j) out.emplace_back(v[2 * j], v[2 * j + 1]);
  return out;
}

json complex_array(const std::vector<cd>& z) {
  json a = json::array();
  for (const auto& c : z) a.push_back(complex_to_json(c));
  return a;
}

MultiIndex index_from_list(const std::vector<int>& v, std::size_t d, const std::string& flag) {
  if (v.size() != d) throw UsageError(flag + " expects " + std::to_string(d) + " components");
  for (int c : v) {
    if (c < 0) throw UsageError(flag + " components must be non-negative");
  }
  return MultiIndex(v);
}

struct Config {
  double tol_commuting = 1e-10;
  double tol_invert = 1e-12;
  std::optional<int> degree_cap;
  std::uint64_t seed = 42;
  int budget = 200;
  int policy_window = 5;
  double policy_margin = 1e-3;
  double cap = 1e12;
  bool strict = false;
  std::string output;

  BpePolicy policy() const {
    BpePolicy p;
    p.window = policy_window;
    p.margin = policy_margin;
    p.cap = cap;
    p.max_layer = degree_cap;
    return p;
  }
};

struct Outcome {
  std::string text;
  bool verdict_ok = true;
};

Outcome json_outcome(const json& doc, bool ok = true) { return {dump_canonical(doc), ok}; }

Outcome cmd_validate(const Config& cfg, const std::string& path) {
  const Family fam = family_from_json_value(read_json_file(path));
  json doc;
  doc["d"] = fam.dim();
  doc["degree_cap"] = fam.cap();
  doc["D"] = fam.layout().total();
  const auto n = fam.layout().constant_dim();
  doc["fiber_dim"] = n ? json(*n) : json(nullptr);
  doc["bounded"] = check_bounded(fam);

  const auto com = check_commuting(fam, cfg.tol_commuting);
  json c;
  c["ok"] = com.commuting;
  c["worst_residual"] = com.worst_residual;
  c["tolerance"] = cfg.tol_commuting;
  if (com.witness) {
    c["witness"] = {{"alpha", to_json_value(com.witness->alpha)},
                    {"i", com.witness->i + 1},
                    {"j", com.witness->j + 1}};
  } else {
    c["witness"] = nullptr;
  }
  doc["commuting"] = c;

  json inv;
  inv["tolerance"] = cfg.tol_invert;
  try {
    const auto rep = check_invertible(fam, cfg.tol_invert);
    inv["square"] = true;
    inv["ok"] = rep.invertible;
    inv["min_sigma"] = rep.min_sigma;
    inv["witness"] = rep.witness ? json{{"j", rep.witness->axis + 1},
                                        {"alpha", to_json_value(rep.witness->alpha)}}
                                 : json(nullptr);
  } catch (const NotSquareError&) {
    inv["square"] = false;
    inv["ok"] = false;
    inv["min_sigma"] = nullptr;
    inv["witness"] = nullptr;
  }
  doc["invertible"] = inv;
  doc["valid"] = com.commuting;
  return json_outcome(doc, com.commuting);
}

Outcome cmd_moments(const std::string& path, const std::vector<int>& alpha_v,
                    const std::vector<int>& beta_v) {
  const Family fam = family_from_json_value(read_json_file(path));
  const MultiIndex alpha = index_from_list(alpha_v, fam.dim(), "--alpha");
  const MultiIndex beta = beta_v.empty() ? alpha : index_from_list(beta_v, fam.dim(), "--beta");
  if (!fam.box().contains(alpha)) throw UsageError("--alpha lies outside the box");
  auto op_json = [](const MomentOperator<cd>& m) {
    return json{{"source", to_json_value(m.source)},
                {"target", to_json_value(m.target)},
                {"matrix", to_json_value(m.matrix)}};
  };
  json doc;
  doc["alpha"] = to_json_value(alpha);
  doc["beta"] = to_json_value(beta);
  doc["B"] = alpha.dominates(beta) ? op_json(moment_B(fam, alpha, beta)) : json(nullptr);
  doc["C"] = fam.box().contains(alpha + beta) ? op_json(moment_C(fam, alpha, beta)) : json(nullptr);
  doc["G_alpha"] = to_json_value(gram_G(fam, alpha));
  return json_outcome(doc);
}

Outcome cmd_props(const Config& cfg, const std::string& path) {
  const Family fam = family_from_json_value(read_json_file(path));
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
  double circ = 0.0;
  for (int k = 0; k < 100; ++k) {
    std::vector<cd> lambda;
    for (std::size_t j = 0; j < fam.dim(); ++j) lambda.push_back(std::polar(1.0, angle(rng)));
    circ = std::max(circ, circular_residual(fam, lambda));
  }
  json doc;
  doc["circular_residual_max"] = circ;
  const auto wand = wandering_span_dim(fam);
  doc["wandering_dim"] = wand.span_dim;
  doc["D"] = wand.total_dim;
  json depths = json::array();
  for (std::size_t j = 0; j < fam.dim(); ++j) {
    const auto a = analytic_depth(fam, j);
    depths.push_back({{"j", j + 1}, {"ranks", a.ranks}, {"support_ok", a.support_ok}});
  }
  doc["analytic_depths"] = depths;
  const auto red = left_invertible_reduce(fam);
  if (const auto* r = std::get_if<Reduction<cd>>(&red)) {
    doc["reduction"] = "applied";
    doc["reduction_detail"] = {{"degree_cap", r->family.cap()},
                               {"fiber_dim", r->bases.empty() ? 0 : r->bases.front().cols()},
                               {"intertwining_residual", r->intertwining_residual}};
  } else {
    const auto& na = std::get<NotApplicable>(red);
    doc["reduction"] = "not_applicable";
    doc["reduction_detail"] = {{"reason", na.reason},
                               {"alpha", optional_index(na.alpha)},
                               {"beta", optional_index(na.beta)}};
  }
  return json_outcome(doc);
}

Outcome cmd_kernel(const Config& cfg, const std::string& path, const std::vector<double>& zv,
                   const std::vector<double>& wv) {
  const Family fam = family_from_json_value(read_json_file(path));
  const auto z = complex_list(zv, fam.dim(), "--z");
  const auto w = wv.empty() ? z : complex_list(wv, fam.dim(), "--w");
  const auto gram = build_gram(fam, cfg.tol_invert);
  const auto k = kernel_eval(gram, z, w);
  json doc;
  doc["z"] = complex_array(z);
  doc["w"] = complex_array(w);
  doc["value"] = to_json_value(k.value);
  doc["last_layer_norm"] = k.last_layer_norm;
  return json_outcome(doc);
}

json series_json(const SeriesVerdict& s) {
  return {{"classification", to_string(s.classification)},
          {"S_last", s.s_last},
          {"ratio_estimate", s.ratio_estimate},
          {"partial_sums", s.partial_sums}};
}

Outcome cmd_bpe(const Config& cfg, const std::string& path, const std::vector<double>& wv,
                const std::vector<double>& radii, const std::vector<double>& dirv) {
  const Family fam = family_from_json_value(read_json_file(path));
  const auto gram = build_gram(fam, cfg.tol_invert);
  const auto policy = cfg.policy();
  if (policy.max_layer && *policy.max_layer > fam.cap()) {
    throw UsageError("--degree-cap exceeds the cap of the family");
  }
  if (!radii.empty()) {
    if (!wv.empty()) throw UsageError("--w and --radii are exclusive");
    const auto dir = dirv.empty() ? std::vector<cd>(fam.dim(), 1.0)
                                  : complex_list(dirv, fam.dim(), "--direction");
    const auto scan = bpe_grid_scan(gram, radii, {dir}, policy);
    return {grid_csv(scan, fam.dim()), scan.disagreements == 0};
  }
  if (wv.empty()) throw UsageError("bpe needs --w or --radii");
  const auto w = complex_list(wv, fam.dim(), "--w");
  const auto v = bpe_test(gram, w, policy);
  const auto ps = pointspec_test(gram, w, policy);
  json doc = series_json(v.series);
  doc["w"] = complex_array(w);
  json p;
  p["status"] = to_string(ps.status);
  p["witness_direction"] = ps.witness && ps.directions
                               ? to_json_value(MatrixXcd(ps.directions->col(*ps.witness)))
                               : json(nullptr);
  doc["pointspec"] = p;
  return json_outcome(doc, v.series.classification == SeriesClass::bpe);
}

Outcome cmd_equiv(const Config& cfg, const std::string& a_path, const std::string& b_path,
                  bool verify) {
  const Family a = family_from_json_value(read_json_file(a_path));
  const Family b = family_from_json_value(read_json_file(b_path));
  DecideOptions opt;
  opt.search.budget = cfg.budget;
  opt.search.seed = cfg.seed;
  opt.verify_intertwine = verify;
  opt.tol_commuting = cfg.tol_commuting;
  opt.tol_invert = cfg.tol_invert;
  const auto v = decide(a, b, opt);
  json doc;
  doc["status"] = to_string(v.status);
  doc["U"] = v.u ? to_json_value(*v.u) : json(nullptr);
  doc["unitarity_residual"] = v.unitarity_residual;
  doc["intertwining_residual"] = v.intertwining_residual;
  doc["witness"] = optional_index(v.witness);
  doc["spectral_gap"] = v.spectral_gap;
  doc["nullspace_dim"] = v.nullspace_dim;
  doc["attempts"] = v.attempts;
  doc["budget"] = cfg.budget;
  doc["seed"] = cfg.seed;
  doc["assumptions"] = v.assumptions;
  bool ok = v.status == EquivalenceStatus::equivalent;
  if (v.shift_check) {
    doc["shift_check"] = {{"block_unitarity", v.shift_check->block_unitarity},
                          {"shift_residual", v.shift_check->shift_residual},
                          {"pass", v.shift_check->pass}};
    ok = ok && v.shift_check->pass;
  } else {
    doc["shift_check"] = nullptr;
  }
  return json_outcome(doc, ok);
}

Outcome cmd_embed_tree(const Config& cfg, const std::string& path, bool random_weights,
                       bool family_only) {
  auto tdoc = tree_document_from_json(read_json_file(path));
  const auto& product = tdoc.product;
  int cap = cfg.degree_cap.value_or(tdoc.degree_cap.value_or(-1));
  if (cap < 0) {
    cap = product.tree(0).height();
    for (const auto& t : product.trees()) cap = std::min(cap, t.height());
  }
  if (random_weights) {
    tdoc.weights = product.dim() == 2 ? commuting_tree_weights(product, cfg.seed)
                                      : separable_tree_weights(product, cfg.seed);
  }
  const auto emb = embed(product, tdoc.weights, cap);
  if (family_only) return json_outcome(family_to_json_value(emb.family));
  json doc;
  doc["family"] = family_to_json_value(emb.family);
  json strata = json::array();
  for (std::size_t r = 0; r < emb.strata.size(); ++r) {
    strata.push_back({{"alpha", to_json_value(emb.family.box().unrank(r))},
                      {"vertices", emb.strata[r]}});
  }
  doc["strata"] = strata;
  doc["intertwining_residual"] = emb.intertwining_residual;
  const auto com = check_commuting(emb.family, cfg.tol_commuting);
  doc["commuting_residual"] = com.worst_residual;
  return json_outcome(doc, com.commuting);
}

Outcome cmd_decompose(const std::string& path, const std::string& basis_path) {
  const Family fam = family_from_json_value(read_json_file(path));
  const auto bdoc = basis_document_from_json(read_json_file(basis_path));
  const auto res = decompose_unilateral(fam, bdoc.bases, bdoc.partitions);
  if (const auto* f = std::get_if<Forest>(&res)) {
    json doc = forest_to_json(*f);
    doc["status"] = "decomposed";
    return json_outcome(doc);
  }
  const auto& na = std::get<NotApplicable>(res);
  json doc{{"status", "not_applicable"},
           {"reason", na.reason},
           {"alpha", optional_index(na.alpha)},
           {"beta", optional_index(na.beta)}};
  return json_outcome(doc, false);
}

Family classical_kind(const std::string& kind, std::size_t d, int cap, double scale, int n) {
  if (kind == "hardy") {
    return classical(d, cap, [scale](std::size_t, const MultiIndex&) { return cd(scale); }, n);
  }
  return classical(
      d, cap,
      [scale](std::size_t j, const MultiIndex& a) {
        return cd(scale * std::sqrt((a[j] + 1.0) / (a.order() + 1.0)));
      },
      n);
}

void write_output(const Config& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw UsageError("cannot open " + cfg.output + " for writing");
  f << text;
}

}  // namespace

TreeDocument tree_document_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("$: expected an object");
  std::vector<json> tree_docs;
  if (doc.contains("trees")) {
    if (!doc["trees"].is_array() || doc["trees"].empty()) {
      throw SchemaError("$.trees: expected a non-empty array");
    }
    for (const auto& t : doc["trees"]) tree_docs.push_back(t);
  } else if (doc.contains("parent")) {
    tree_docs.push_back(json{{"parent", doc["parent"]}});
  } else {
    throw SchemaError("$: missing \"trees\"");
  }
  std::vector<RootedTree> trees;
  for (std::size_t t = 0; t < tree_docs.size(); ++t) {
    const std::string p = "$.trees[" + std::to_string(t) + "].parent";
    const auto& par = tree_docs[t].is_object() && tree_docs[t].contains("parent")
                          ? tree_docs[t]["parent"]
                          : json();
    if (!par.is_array()) throw SchemaError(p + ": expected an array");
    std::vector<std::optional<int>> parent;
    for (std::size_t v = 0; v < par.size(); ++v) {
      if (par[v].is_null()) {
        parent.emplace_back();
      } else if (par[v].is_number_integer()) {
        parent.emplace_back(par[v].get<int>());
      } else {
        throw SchemaError(p + "[" + std::to_string(v) + "]: expected an integer or null");
      }
    }
    try {
      trees.emplace_back(std::move(parent));
    } catch (const DomainError& e) {
      throw SchemaError(p + ": " + e.what());
    }
  }
  TreeDocument out{TreeProduct(std::move(trees)), {}, std::nullopt};
  if (doc.contains("degree_cap")) {
    if (!doc["degree_cap"].is_number_integer()) throw SchemaError("$.degree_cap: expected an integer");
    out.degree_cap = doc["degree_cap"].get<int>();
  }
  if (doc.contains("weights")) {
    const auto& ws = doc["weights"];
    if (!ws.is_array()) throw SchemaError("$.weights: expected an array");
    const std::size_t d = out.product.dim();
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const std::string p = "$.weights[" + std::to_string(i) + "]";
      const auto& w = ws[i];
      if (!w.is_object() || !w.contains("j") || !w.contains("v") || !w.contains("value")) {
        throw SchemaError(p + ": expected {\"j\", \"v\", \"value\"}");
      }
      if (!w["j"].is_number_integer()) throw SchemaError(p + ".j: expected an integer");
      const int j = w["j"].get<int>();
      if (j < 1 || static_cast<std::size_t>(j) > d) throw SchemaError(p + ".j: axis out of range");
      if (!w["v"].is_array() || w["v"].size() != d) {
        throw SchemaError(p + ".v: expected " + std::to_string(d) + " vertex ids");
      }
      ProductVertex v;
      for (std::size_t k = 0; k < d; ++k) {
        if (!w["v"][k].is_number_integer()) throw SchemaError(p + ".v: expected integers");
        const int id = w["v"][k].get<int>();
        if (id < 0 || static_cast<std::size_t>(id) >= out.product.tree(k).size()) {
          throw SchemaError(p + ".v[" + std::to_string(k) + "]: vertex out of range");
        }
        v.push_back(id);
      }
      out.weights.set(static_cast<std::size_t>(j - 1), v, complex_from_json(w["value"], p + ".value"));
    }
  }
  return out;
}

json forest_to_json(const Forest& forest) {
  json trees = json::array();
  for (const auto& t : forest.trees) {
    json parent = json::array();
    for (const auto& p : t.tree.parents()) parent.push_back(p ? json(*p) : json(nullptr));
    json places = json::array();
    for (const auto& [level, idx] : t.place) places.push_back({level, idx});
    trees.push_back({{"parent", parent}, {"weights", complex_array(t.weights)}, {"basis_map", places}});
  }
  json leaves = json::array();
  for (const auto& [level, idx] : forest.leaves) leaves.push_back({level, idx});
  return {{"trees", trees}, {"leaves", leaves}, {"residual", forest.residual}};
}

BasisDocument basis_document_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("bases") || !doc.contains("partitions")) {
    throw SchemaError("$: expected {\"bases\", \"partitions\"}");
  }
  BasisDocument out;
  if (!doc["bases"].is_array()) throw SchemaError("$.bases: expected an array");
  for (std::size_t n = 0; n < doc["bases"].size(); ++n) {
    out.bases.push_back(matrix_from_json(doc["bases"][n], "$.bases[" + std::to_string(n) + "]"));
  }
  const auto& parts = doc["partitions"];
  if (!parts.is_array()) throw SchemaError("$.partitions: expected an array");
  for (std::size_t n = 0; n < parts.size(); ++n) {
    const std::string p = "$.partitions[" + std::to_string(n) + "]";
    if (!parts[n].is_array()) throw SchemaError(p + ": expected an array");
    std::vector<std::vector<int>> level;
    for (std::size_t x = 0; x < parts[n].size(); ++x) {
      const auto& kids = parts[n][x];
      if (!kids.is_array()) throw SchemaError(p + "[" + std::to_string(x) + "]: expected an array");
      std::vector<int> ids;
      for (const auto& k : kids) {
        if (!k.is_number_integer()) {
          throw SchemaError(p + "[" + std::to_string(x) + "]: expected integers");
        }
        ids.push_back(k.get<int>());
      }
      level.push_back(std::move(ids));
    }
    out.partitions.push_back(std::move(level));
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Truncated operator-valued multishifts: construction, structure and model analysis",
               "opshift"};
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  app.add_option("--tol-commuting", cfg.tol_commuting, "relative commuting tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol-invert", cfg.tol_invert, "smallest admissible singular value")
      ->check(CLI::PositiveNumber);
  app.add_option("--degree-cap", cfg.degree_cap, "degree cap N of the truncation box")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--budget", cfg.budget, "random unitary candidates")->check(CLI::NonNegativeNumber);
  app.add_option("--policy-window", cfg.policy_window, "increments used by the ratio estimate")
      ->check(CLI::PositiveNumber);
  app.add_option("--policy-margin", cfg.policy_margin, "ratio margin around 1")
      ->check(CLI::PositiveNumber);
  app.add_option("--cap", cfg.cap, "divergence cap on partial sums")->check(CLI::PositiveNumber);
  app.add_flag("--strict", cfg.strict, "exit 1 when the verdict fails");
  app.add_option("--output", cfg.output, "write to a file instead of standard output");

  std::string file, file_b, basis;
  std::vector<int> alpha, beta;
  std::vector<double> zv, wv, radii, dirv;
  bool verify = false, random_weights = false, family_only = false;

  auto* validate = app.add_subcommand("validate", "check a weight family");
  validate->add_option("family", file, "weight-family JSON")->required();
  auto* moments = app.add_subcommand("moments", "moment operators B, C and G");
  moments->add_option("family", file, "weight-family JSON")->required();
  moments->add_option("--alpha", alpha, "multi-index, comma separated")->required()->delimiter(',');
  moments->add_option("--beta", beta, "multi-index, comma separated")->delimiter(',');
  auto* props = app.add_subcommand("props", "circularity, wandering subspace, analyticity");
  props->add_option("family", file, "weight-family JSON")->required();
  auto* kernel = app.add_subcommand("kernel", "evaluate the reproducing kernel");
  kernel->add_option("family", file, "weight-family JSON")->required();
  kernel->add_option("--z", zv, "point z as re,im per axis")->required()->delimiter(',');
  kernel->add_option("--w", wv, "point w as re,im per axis (defaults to z)")->delimiter(',');
  auto* bpe = app.add_subcommand("bpe", "bounded point evaluation and point spectrum tests");
  bpe->add_option("family", file, "weight-family JSON")->required();
  bpe->add_option("--w", wv, "point as re,im per axis")->delimiter(',');
  bpe->add_option("--radii", radii, "radii for a CSV scan")->delimiter(',');
  bpe->add_option("--direction", dirv, "scan direction as re,im per axis")->delimiter(',');
  auto* equiv = app.add_subcommand("equiv", "decide unitary equivalence");
  equiv->add_option("--a", file, "first weight-family JSON")->required();
  equiv->add_option("--b", file_b, "second weight-family JSON")->required();
  equiv->add_flag("--verify-intertwine", verify, "also check the assembled shifts");
  auto* tree = app.add_subcommand("embed-tree", "embed a product of rooted trees");
  tree->add_option("trees", file, "tree-product JSON")->required();
  tree->add_flag("--random-weights", random_weights, "seeded random commuting weights");
  tree->add_flag("--family-only", family_only, "emit only the weight-family JSON");
  auto* decomp = app.add_subcommand("decompose-shift", "split a one-variable shift into tree shifts");
  decomp->add_option("family", file, "weight-family JSON")->required();
  decomp->add_option("--basis", basis, "bases and partitions JSON")->required();

  auto* gen = app.add_subcommand("gen-example", "emit an example weight family");
  gen->require_subcommand(1);
  gen->fallthrough();
  std::size_t d = 2;
  gen->add_option("--d", d, "number of variables")->check(CLI::PositiveNumber);
  std::string kind = "hardy", convention = "model";
  double scale = 1.0;
  int n = 1;
  std::vector<double> av{2.0, 0.0}, bv{0.5, 0.0};
  auto* g_classical = gen->add_subcommand("classical", "scalar weights times the identity");
  g_classical->fallthrough();
  g_classical->add_option("--kind", kind, "hardy or drury-arveson")
      ->check(CLI::IsMember({"hardy", "drury-arveson"}));
  g_classical->add_option("--scale", scale, "overall weight scale");
  g_classical->add_option("--n", n, "fiber dimension")->check(CLI::PositiveNumber);
  auto* g_ex33 = gen->add_subcommand("example33", "2x2 row contraction example");
  g_ex33->fallthrough();
  auto* g_diag = gen->add_subcommand("diag", "constant weight diag(a, b)");
  g_diag->fallthrough();
  g_diag->add_option("--a", av, "a as re,im")->delimiter(',')->expected(2);
  g_diag->add_option("--b", bv, "b as re,im")->delimiter(',')->expected(2);
  auto* g_r34 = gen->add_subcommand("remark34", "family with the square-root Gram factors");
  g_r34->fallthrough();
  g_r34->add_option("--convention", convention, "as_printed or model")
      ->check(CLI::IsMember({"as_printed", "model"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    Outcome res;
    if (validate->parsed()) {
      res = cmd_validate(cfg, file);
    } else if (moments->parsed()) {
      res = cmd_moments(file, alpha, beta);
    } else if (props->parsed()) {
      res = cmd_props(cfg, file);
    } else if (kernel->parsed()) {
      res = cmd_kernel(cfg, file, zv, wv);
    } else if (bpe->parsed()) {
      res = cmd_bpe(cfg, file, wv, radii, dirv);
    } else if (equiv->parsed()) {
      res = cmd_equiv(cfg, file, file_b, verify);
    } else if (tree->parsed()) {
      res = cmd_embed_tree(cfg, file, random_weights, family_only);
    } else if (decomp->parsed()) {
      res = cmd_decompose(file, basis);
    } else {
      const int cap = cfg.degree_cap.value_or(4);
      Family fam = Family::zeros(TruncationBox(1, 1), FiberMap(1));
      if (g_classical->parsed()) {
        fam = classical_kind(kind, d, cap, scale, n);
      } else if (g_ex33->parsed()) {
        fam = example33(d, cap);
      } else if (g_diag->parsed()) {
        fam = diag_powers(d, cap, cd(av[0], av[1]), cd(bv[0], bv[1]));
      } else {
        fam = remark34(d, cap, convention == "model" ? Remark34Convention::model
                                                     : Remark34Convention::as_printed)
                  .family;
      }
      res = json_outcome(family_to_json_value(fam));
    }
    write_output(cfg, res.text, out);
    return cfg.strict && !res.verdict_ok ? 1 : 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"opshift"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace opshift::cli
