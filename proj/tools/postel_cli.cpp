// postel: posterior label smoothing for transductive node classification.
//
// Subcommands: smooth, run, gen-synth, verify, sweep. File formats are plain
// CSV / whitespace edge lists; every output starts with a `# tool | flags`
// provenance line. Exit codes: 0 success, 1 verification violation, 2 input
// error, 3 statistics error, 4 training divergence, 5 infeasible spec.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "postel/postel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace postel;

namespace {

std::string g_provenance;

std::string join_args(int argc, char** argv) {
  std::string out = "postel ";
  out += kToolVersion;
  out += " |";
  for (int i = 1; i < argc; ++i) {
    out += ' ';
    out += argv[i];
  }
  return out;
}

LikelihoodVariant parse_variant(const std::string& text, int& hops) {
  if (text == "global") return LikelihoodVariant::Global;
  if (text == "normalized") return LikelihoodVariant::Normalized;
  if (text.rfind("local", 0) == 0) {
    if (text.size() > 6 && text[5] == ':') hops = std::stoi(text.substr(6));
    if (hops < 1) throw ParseError(0, "local variant needs H >= 1");
    return LikelihoodVariant::LocalH;
  }
  throw ParseError(0, "unknown variant: " + text + " (use global|normalized|local:H)");
}

struct Bundle {
  Graph graph;
  std::vector<int> labels;  // -1 = unknown
  int num_classes = 0;
};

Bundle load_graph_and_labels(const std::string& graph_path, const std::string& labels_path,
                             std::size_t nodes_override, int classes_override) {
  const EdgeList edges = read_edge_list(graph_path);
  std::size_t n = nodes_override;
  if (n == 0) {
    for (const auto& [u, v] : edges) n = std::max<std::size_t>({n, u + 1ull, v + 1ull});
  }
  if (n == 0) throw ParseError(0, "empty graph; pass --nodes");
  Bundle b;
  b.graph = build_graph(n, edges);
  b.labels = read_labels_csv(labels_path, n);
  int k = classes_override;
  if (k == 0) {
    for (int y : b.labels) k = std::max(k, y + 1);
  }
  for (int y : b.labels)
    if (y >= k) throw ParseError(0, "label " + std::to_string(y) + " exceeds --classes");
  b.num_classes = k;
  return b;
}

LabelState all_ground_truth(const std::vector<int>& labels, int k) {
  LabelState s = LabelState::unlabeled(labels.size(), k);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) s.set_ground_truth(i, labels[i]);
  return s;
}

json stats_to_json(const ClassStats& stats, std::size_t counted_nodes) {
  json j;
  j["counted_sources"] =
      stats.counted_sources.pseudo ? "ground_truth+pseudo" : "ground_truth";
  j["counted_nodes"] = counted_nodes;
  j["prior"] = stats.prior;
  json rows = json::array();
  for (std::size_t r = 0; r < stats.conditional.rows; ++r) {
    const auto row = stats.conditional.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["conditional"] = rows;
  return j;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["variant"] = to_string(cfg.variant);
  j["local_hops"] = cfg.local_hops;
  j["ablation"] = {{"posterior_smoothing", cfg.ablation.posterior_smoothing},
                   {"uniform_noise", cfg.ablation.uniform_noise},
                   {"iterative_pseudo", cfg.ablation.iterative_pseudo}};
  j["max_pl_iterations"] = cfg.max_pl_iterations;
  j["label_fraction"] = cfg.label_fraction;
  j["floor"] = cfg.floor;
  j["trainer"] = {{"model", to_string(cfg.trainer.model_kind)},
                  {"learning_rate", cfg.trainer.learning_rate},
                  {"weight_decay", cfg.trainer.weight_decay},
                  {"max_epochs", cfg.trainer.max_epochs},
                  {"patience", cfg.trainer.patience},
                  {"hidden_dim", cfg.trainer.hidden_dim},
                  {"dropout", cfg.trainer.dropout},
                  {"seed", cfg.trainer.seed}};
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError(0, "cannot write " + path);
  out << j.dump(2) << "\n";
}

// ---- smooth ---------------------------------------------------------------

struct SmoothArgs {
  std::string graph, labels, output;
  std::size_t nodes = 0;
  int classes = 0;
  double alpha = 0.5;
  double beta = 0.1;
  double floor = 1e-12;
  std::string variant = "global";
};

int cmd_smooth(const SmoothArgs& args) {
  Bundle bundle = load_graph_and_labels(args.graph, args.labels, args.nodes, args.classes);
  const LabelState labels = all_ground_truth(bundle.labels, bundle.num_classes);

  ExperimentConfig cfg;
  cfg.alpha = args.alpha;
  cfg.beta = args.beta;
  cfg.floor = args.floor;
  cfg.variant = parse_variant(args.variant, cfg.local_hops);

  ClassStats stats;
  stats.counted_sources = SourceSet::ground_truth_only();
  stats.prior = estimate_prior(labels, stats.counted_sources);
  stats.conditional = cfg.variant == LikelihoodVariant::Normalized
                          ? estimate_conditional_normalized(bundle.graph, labels,
                                                            stats.counted_sources)
                          : estimate_conditional(bundle.graph, labels, stats.counted_sources);

  SoftLabels soft = pipeline_detail::posteriors_for(bundle.graph, labels, stats, cfg);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels.labeled(i)) continue;
    const auto target = blend(soft.probs.row(i), labels.cls[i], cfg.alpha, cfg.beta);
    std::copy(target.begin(), target.end(), soft.probs.row(i).begin());
    soft.provenance[i] = TargetProvenance::Blended;
  }
  write_soft_labels_csv(args.output, soft, g_provenance);
  std::cout << "wrote " << args.output << " (" << soft.probs.rows << " nodes, K="
            << bundle.num_classes << ")\n";
  return 0;
}

// ---- run / sweep ----------------------------------------------------------

struct RunArgs {
  std::string graph, labels, features, split, out_dir;
  std::size_t nodes = 0;
  int classes = 0;
  std::string model = "gcn";
  double alpha = 0.5;
  double beta = 0.1;
  std::string variant = "global";
  double floor = 1e-12;
  bool no_iterate = false;
  std::size_t max_iters = 10;
  std::uint64_t seed = 0;
  double label_fraction = 1.0;
  double lr = 0.01;
  double weight_decay = 0.0005;
  std::size_t epochs = 1000;
  std::size_t patience = 200;
  std::size_t hidden = 64;
  double dropout = 0.5;
  std::string alpha_grid, beta_grid;  // sweep only
};

struct LoadedExperiment {
  Bundle bundle;
  Matrix features;
  Split split;
  LabelState train_labels;
  ExperimentConfig cfg;
};

LoadedExperiment load_experiment(const RunArgs& args) {
  LoadedExperiment exp;
  exp.bundle = load_graph_and_labels(args.graph, args.labels, args.nodes, args.classes);
  const std::size_t n = exp.bundle.graph.num_nodes;
  exp.features = read_features_csv(args.features, n);
  exp.split = read_split_csv(args.split, n);
  if (exp.split.train.empty()) throw ParseError(0, "split has no train nodes");

  exp.train_labels = LabelState::unlabeled(n, exp.bundle.num_classes);
  for (NodeId i : exp.split.train)
    if (exp.bundle.labels[i] >= 0)
      exp.train_labels.set_ground_truth(i, exp.bundle.labels[i]);

  ExperimentConfig& cfg = exp.cfg;
  cfg.alpha = args.alpha;
  cfg.beta = args.beta;
  cfg.floor = args.floor;
  cfg.variant = parse_variant(args.variant, cfg.local_hops);
  cfg.max_pl_iterations = args.max_iters;
  cfg.ablation.iterative_pseudo = !args.no_iterate;
  cfg.label_fraction = args.label_fraction;
  cfg.trainer.model_kind = args.model == "mlp" ? ModelKind::MLP : ModelKind::GCN;
  cfg.trainer.learning_rate = args.lr;
  cfg.trainer.weight_decay = args.weight_decay;
  cfg.trainer.max_epochs = args.epochs;
  cfg.trainer.patience = args.patience;
  cfg.trainer.hidden_dim = args.hidden;
  cfg.trainer.dropout = args.dropout;
  cfg.trainer.seed = args.seed;
  return exp;
}

json result_to_json(const ExperimentResult& res, const ExperimentConfig& cfg,
                    const std::string& out_dir, bool write_histories) {
  // --no-iterate and --max-iters 0 are the same effective configuration;
  // echo the canonical form so their outputs match.
  ExperimentConfig canonical = cfg;
  if (!canonical.ablation.iterative_pseudo) canonical.max_pl_iterations = 0;
  if (canonical.max_pl_iterations == 0) canonical.ablation.iterative_pseudo = false;
  json j;
  j["provenance"] = {{"tool", "postel"}, {"version", kToolVersion}, {"args", g_provenance}};
  j["config"] = config_to_json(canonical);
  json iters = json::array();
  for (const auto& rec : res.iterations) {
    json ji;
    ji["iteration"] = rec.iteration;
    ji["val_loss"] = rec.val_loss;
    ji["test_accuracy"] = rec.test_accuracy;
    ji["best_epoch"] = rec.best_epoch;
    ji["epochs"] = rec.history.size();
    ji["stats"] = stats_to_json(rec.stats, rec.counted_nodes);
    if (write_histories) {
      const std::string name = "history_iter" + std::to_string(rec.iteration) + ".csv";
      write_history_csv((fs::path(out_dir) / name).string(), rec.history, g_provenance);
      ji["history_csv"] = name;
    }
    iters.push_back(std::move(ji));
  }
  j["iterations"] = std::move(iters);
  j["best_iteration"] = res.best_iteration;
  j["final_test_accuracy"] = res.final_test_accuracy;
  j["iterations_used"] = res.iterations_used;
  j["wallclock_seconds"] = res.wallclock_seconds;
  return j;
}

int cmd_run(const RunArgs& args) {
  LoadedExperiment exp = load_experiment(args);
  fs::create_directories(args.out_dir);
  const ExperimentResult res =
      run_postel(exp.bundle.graph, exp.features, exp.train_labels, exp.bundle.labels,
                 exp.split, exp.cfg);
  const json j = result_to_json(res, exp.cfg, args.out_dir, true);
  write_json((fs::path(args.out_dir) / "result.json").string(), j);
  std::cout << "best_iteration=" << res.best_iteration
            << " final_test_accuracy=" << res.final_test_accuracy
            << " iterations_used=" << res.iterations_used << "\n";
  return 0;
}

int cmd_sweep(const RunArgs& args) {
  LoadedExperiment exp = load_experiment(args);
  fs::create_directories(args.out_dir);

  auto parse_grid = [](const std::string& text, std::vector<double> fallback) {
    if (text.empty()) return fallback;
    std::vector<double> grid;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t comma = text.find(',', start);
      const std::string tok = text.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!tok.empty()) grid.push_back(std::stod(tok));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (grid.empty()) throw ParseError(0, "empty grid");
    return grid;
  };
  const auto alphas = parse_grid(args.alpha_grid, default_alpha_grid());
  const auto betas = parse_grid(args.beta_grid, default_beta_grid());

  const SweepResult sweep =
      grid_sweep(exp.bundle.graph, exp.features, exp.train_labels, exp.bundle.labels,
                 exp.split, exp.cfg, alphas, betas);

  std::ofstream table((fs::path(args.out_dir) / "sweep.csv").string());
  table << "# " << g_provenance << "\n";
  table << "alpha,beta,best_val_loss,test_acc,iterations_used\n";
  for (const auto& cell : sweep.table) {
    table << io_detail::format_double(cell.alpha) << ","
          << io_detail::format_double(cell.beta) << ","
          << io_detail::format_double(cell.best_val_loss) << ","
          << io_detail::format_double(cell.test_accuracy) << "," << cell.iterations_used
          << "\n";
  }

  json best;
  best["provenance"] = {{"tool", "postel"}, {"version", kToolVersion}, {"args", g_provenance}};
  best["config"] = config_to_json(sweep.best_config);
  best["best_val_loss"] = sweep.best_cell.best_val_loss;
  best["test_accuracy"] = sweep.best_cell.test_accuracy;
  write_json((fs::path(args.out_dir) / "best_config.json").string(), best);
  std::cout << "best alpha=" << sweep.best_cell.alpha << " beta=" << sweep.best_cell.beta
            << " val_loss=" << sweep.best_cell.best_val_loss
            << " test_acc=" << sweep.best_cell.test_accuracy << "\n";
  return 0;
}

// ---- gen-synth ------------------------------------------------------------

struct GenArgs {
  std::size_t nodes = 500;
  int classes = 2;
  std::string homophily = "0.8,0.8";
  double avg_degree = 10.0;
  std::size_t feature_dim = 8;
  double signal = 1.0;
  std::uint64_t seed = 0;
  bool unbalanced = false;
  bool forbid_isolated = false;
  std::string out_dir;
};

int cmd_gen_synth(const GenArgs& args) {
  SyntheticSpec spec;
  spec.num_nodes = args.nodes;
  spec.num_classes = args.classes;
  spec.class_homophily.clear();
  {
    std::size_t start = 0;
    while (start <= args.homophily.size()) {
      const std::size_t comma = args.homophily.find(',', start);
      const std::string tok = args.homophily.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!tok.empty()) spec.class_homophily.push_back(std::stod(tok));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (spec.class_homophily.size() == 1)
    spec.class_homophily.assign(args.classes, spec.class_homophily[0]);
  spec.avg_degree = args.avg_degree;
  spec.feature_dim = args.feature_dim;
  spec.feature_signal = args.signal;
  spec.balanced = !args.unbalanced;
  spec.forbid_isolated = args.forbid_isolated;
  spec.seed = args.seed;

  const SyntheticData data = generate(spec);

  // 60/20/20 split, stratified by class, seeded.
  Split split;
  std::vector<std::vector<NodeId>> by_class(spec.num_classes);
  for (std::size_t i = 0; i < data.labels.size(); ++i)
    by_class[data.labels.cls[i]].push_back(static_cast<NodeId>(i));
  auto rng = make_rng(spec.seed, 0x5417);
  for (auto& nodes : by_class) {
    std::shuffle(nodes.begin(), nodes.end(), rng);
    const std::size_t tr = nodes.size() * 6 / 10;
    const std::size_t va = nodes.size() * 2 / 10;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (i < tr) split.train.push_back(nodes[i]);
      else if (i < tr + va) split.val.push_back(nodes[i]);
      else split.test.push_back(nodes[i]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());

  fs::create_directories(args.out_dir);
  write_edge_list((fs::path(args.out_dir) / "edges.txt").string(), data.graph, g_provenance);
  write_labels_csv((fs::path(args.out_dir) / "labels.csv").string(), data.labels.cls,
                   g_provenance);
  write_features_csv((fs::path(args.out_dir) / "features.csv").string(), data.features,
                     g_provenance);
  write_split_csv((fs::path(args.out_dir) / "split.csv").string(), split, g_provenance);

  const auto measured = class_homophily(data.graph, data.labels);
  std::cout << "wrote bundle to " << args.out_dir << "; measured homophily:";
  for (double c : measured) std::cout << " " << c;
  std::cout << "\n";
  return 0;
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
  std::string suite = "all";
  std::size_t trials = 1000;
  int max_degree = 20;
  std::uint64_t seed = 0;
  std::string output;
  bool inject_corruption = false;
};

json lemma_report_to_json(const LemmaReport& report) {
  json j;
  j["lemma"] = report.lemma;
  j["c0"] = report.c0;
  j["c1"] = report.c1;
  j["max_degree"] = report.max_degree;
  j["cases_checked"] = report.cases_checked;
  json v = json::array();
  for (const auto& violation : report.violations)
    v.push_back({{"class", violation.cls},
                 {"same", violation.same},
                 {"other", violation.other},
                 {"posterior", violation.posterior},
                 {"reference", violation.reference},
                 {"note", violation.note}});
  j["violations"] = std::move(v);
  return j;
}

int cmd_verify(const VerifyArgs& args) {
  json report;
  report["provenance"] = {{"tool", "postel"}, {"version", kToolVersion}, {"args", g_provenance}};
  report["params"] = {{"suite", args.suite},
                      {"trials", args.trials},
                      {"max_degree", args.max_degree},
                      {"seed", args.seed}};
  json violations = json::array();
  std::size_t cases = 0;

  const bool lemmas = args.suite == "lemmas" || args.suite == "all";
  const bool oracle = args.suite == "oracle" || args.suite == "all";
  const bool independence = args.suite == "independence" || args.suite == "all";
  if (!lemmas && !oracle && !independence)
    throw ParseError(0, "unknown suite: " + args.suite);

  if (lemmas) {
    auto rng = make_rng(args.seed, 0x7E44A);
    std::uniform_real_distribution<double> homo(0.55, 0.99);
    std::uniform_real_distribution<double> hetero(0.01, 0.45);
    json suite = json::array();
    for (std::size_t trial = 0; trial < 50; ++trial) {
      const LemmaReport reports[3] = {
          verify_lemma_homophilic(homo(rng), homo(rng), args.max_degree),
          verify_lemma_heterophilic(hetero(rng), hetero(rng), args.max_degree),
          verify_degree_lemmas(hetero(rng), hetero(rng), args.max_degree)};
      for (const auto& r : reports) {
        cases += r.cases_checked;
        if (!r.ok()) {
          suite.push_back(lemma_report_to_json(r));
          for (const auto& v : r.violations)
            violations.push_back({{"suite", "lemmas"},
                                  {"lemma", r.lemma},
                                  {"c0", r.c0},
                                  {"c1", r.c1},
                                  {"note", v.note}});
        }
      }
    }
    report["lemma_failures"] = std::move(suite);
  }

  if (oracle) {
    auto rng = make_rng(args.seed, 0x02AC1E);
    std::uniform_int_distribution<std::size_t> nodes(5, 50);
    std::uniform_int_distribution<int> classes(2, 5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double max_err = 0.0;
    for (std::size_t trial = 0; trial < args.trials; ++trial) {
      const std::size_t n = nodes(rng);
      const int k = classes(rng);
      const double p = 0.02 + 0.2 * unif(rng);
      EdgeList edges;
      for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
          if (unif(rng) < p) edges.emplace_back(u, v);
      const Graph g = build_graph(n, edges);
      LabelState labels = LabelState::unlabeled(n, k);
      std::uniform_int_distribution<int> cls(0, k - 1);
      for (std::size_t i = 0; i < n; ++i)
        if (unif(rng) < 0.7) labels.set_ground_truth(i, cls(rng));
      bool any = false;
      for (std::size_t i = 0; i < n; ++i) any = any || labels.labeled(i);
      if (!any) labels.set_ground_truth(0, 0);

      ClassStats stats;
      stats.counted_sources = SourceSet::all();
      stats.prior = estimate_prior(labels, stats.counted_sources);
      stats.conditional = estimate_conditional(g, labels, stats.counted_sources);

      std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
      NodeId node = pick(rng);
      for (int attempt = 0; attempt < 64 && g.degree(node) > 30; ++attempt)
        node = pick(rng);
      if (g.degree(node) > 30) continue;

      auto impl = posterior_one(g, labels, stats, node);
      if (args.inject_corruption) {
        impl[0] += 1e-3;
        const double total = row_sum(impl);
        for (double& x : impl) x /= total;
      }
      const auto exact = brute_force_posterior(g, labels, stats, node);
      ++cases;
      for (int c = 0; c < k; ++c) {
        const double err = std::abs(impl[c] - exact[c]) /
                           std::max({1.0, std::abs(impl[c]), std::abs(exact[c])});
        max_err = std::max(max_err, err);
        if (err > 1e-10) {
          violations.push_back({{"suite", "oracle"},
                                {"trial", trial},
                                {"node", node},
                                {"class", c},
                                {"impl", impl[c]},
                                {"oracle", exact[c]},
                                {"rel_error", err}});
          break;
        }
      }
    }
    report["oracle_max_rel_error"] = max_err;
  }

  if (independence) {
    const auto iid = generate_independent_stars(400, 4, args.seed);
    const auto good = independence_report(iid.graph, iid.labels);
    const auto paired = generate_correlated_stars(666, 1, args.seed);
    const auto bad = independence_report(paired.graph, paired.labels);
    cases += 2;
    report["max_deviation"] = {{"independent", good.max_abs_deviation},
                               {"correlated", bad.max_abs_deviation}};
    if (good.max_abs_deviation > 0.05)
      violations.push_back({{"suite", "independence"},
                            {"construction", "independent"},
                            {"max_deviation", good.max_abs_deviation},
                            {"bound", 0.05}});
    if (bad.max_abs_deviation <= 0.1)
      violations.push_back({{"suite", "independence"},
                            {"construction", "correlated"},
                            {"max_deviation", bad.max_abs_deviation},
                            {"bound", 0.1}});
  }

  report["cases_checked"] = cases;
  report["violations"] = violations;
  if (!args.output.empty()) write_json(args.output, report);

  std::cout << "suite=" << args.suite << " cases=" << cases
            << " violations=" << violations.size() << "\n";
  if (!violations.empty()) {
    std::cout << violations.dump(2) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  g_provenance = join_args(argc, argv);

  CLI::App app{"posterior label smoothing for transductive node classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("postel ") + kToolVersion);
  // Config file: simple `<subcommand>.<option>=value` lines (or a
  // [subcommand] section); command-line flags override config values.
  app.set_config("--config");

  SmoothArgs smooth_args;
  auto* smooth = app.add_subcommand("smooth", "compute posterior soft labels");
  smooth->fallthrough(true);
  smooth->add_option("--graph", smooth_args.graph, "edge list file")->required();
  smooth->add_option("--labels", smooth_args.labels, "labels csv")->required();
  smooth->add_option("--output,-o", smooth_args.output, "soft label csv")->required();
  smooth->add_option("--nodes", smooth_args.nodes, "node count override");
  smooth->add_option("--classes", smooth_args.classes, "class count override");
  smooth->add_option("--alpha", smooth_args.alpha, "posterior weight");
  smooth->add_option("--beta", smooth_args.beta, "uniform noise weight");
  smooth->add_option("--floor", smooth_args.floor, "log floor for zero conditionals");
  smooth->add_option("--variant", smooth_args.variant, "global|normalized|local:H");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "train with posterior label smoothing");
  auto add_run_options = [](CLI::App* cmd, RunArgs& a) {
    cmd->fallthrough(true);
    cmd->add_option("--graph", a.graph, "edge list file")->required();
    cmd->add_option("--labels", a.labels, "labels csv")->required();
    cmd->add_option("--features", a.features, "features csv")->required();
    cmd->add_option("--split", a.split, "split csv")->required();
    cmd->add_option("--out-dir", a.out_dir, "output directory")->required();
    cmd->add_option("--nodes", a.nodes, "node count override");
    cmd->add_option("--classes", a.classes, "class count override");
    cmd->add_option("--model", a.model, "gcn|mlp")->check(CLI::IsMember({"gcn", "mlp"}));
    cmd->add_option("--alpha", a.alpha, "posterior weight");
    cmd->add_option("--beta", a.beta, "uniform noise weight");
    cmd->add_option("--variant", a.variant, "global|normalized|local:H");
    cmd->add_option("--floor", a.floor, "log floor");
    cmd->add_flag("--no-iterate", a.no_iterate, "disable iterative pseudo-labeling");
    cmd->add_option("--max-iters", a.max_iters, "pseudo-labeling iteration cap");
    cmd->add_option("--seed", a.seed, "rng seed");
    cmd->add_option("--label-fraction", a.label_fraction, "train label fraction kept");
    cmd->add_option("--lr", a.lr, "learning rate");
    cmd->add_option("--weight-decay", a.weight_decay, "weight decay");
    cmd->add_option("--epochs", a.epochs, "max epochs");
    cmd->add_option("--patience", a.patience, "early stopping patience");
    cmd->add_option("--hidden", a.hidden, "hidden width");
    cmd->add_option("--dropout", a.dropout, "dropout probability");
  };
  add_run_options(run, run_args);

  RunArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "grid sweep over alpha and beta");
  add_run_options(sweep, sweep_args);
  sweep->add_option("--alpha-grid", sweep_args.alpha_grid, "comma list (default paper grid)");
  sweep->add_option("--beta-grid", sweep_args.beta_grid, "comma list (default paper grid)");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen-synth", "generate a synthetic dataset bundle");
  gen->fallthrough(true);
  gen->add_option("--nodes", gen_args.nodes, "node count");
  gen->add_option("--classes", gen_args.classes, "class count");
  gen->add_option("--homophily", gen_args.homophily, "comma list c0,c1,...");
  gen->add_option("--avg-degree", gen_args.avg_degree, "expected average degree");
  gen->add_option("--feature-dim", gen_args.feature_dim, "feature dimension");
  gen->add_option("--signal", gen_args.signal, "class-mean separation");
  gen->add_option("--seed", gen_args.seed, "rng seed");
  gen->add_flag("--unbalanced", gen_args.unbalanced, "draw labels uniformly at random");
  gen->add_flag("--forbid-isolated", gen_args.forbid_isolated, "attach isolated nodes");
  gen->add_option("--out-dir", gen_args.out_dir, "output directory")->required();

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "run the verification suites");
  verify->fallthrough(true);
  verify->add_option("--suite", verify_args.suite, "lemmas|oracle|independence|all");
  verify->add_option("--trials", verify_args.trials, "oracle trial count");
  verify->add_option("--max-degree", verify_args.max_degree, "exhaustive degree bound");
  verify->add_option("--seed", verify_args.seed, "rng seed");
  verify->add_option("--output", verify_args.output, "verification report json");
  verify->add_flag("--inject-corruption", verify_args.inject_corruption)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (smooth->parsed()) return cmd_smooth(smooth_args);
    if (run->parsed()) return cmd_run(run_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (gen->parsed()) return cmd_gen_synth(gen_args);
    if (verify->parsed()) return cmd_verify(verify_args);
  } catch (const NonFiniteLoss& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const InfeasibleSpec& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const NoLabeledNodes& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
