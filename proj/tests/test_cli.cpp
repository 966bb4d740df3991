// End-to-end checks of the postel binary: exit codes, file outputs, and
// determinism. Usage: test_cli <path-to-postel>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "postel/io.hpp"
#include "postel/label_stats.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int failures = 0;

#define CHECK(cond)                                                       \
  do {                                                                    \
    if (!(cond)) {                                                        \
      ++failures;                                                         \
      std::printf("FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond);         \
    }                                                                     \
  } while (0)

std::string cli;
fs::path work;

int run(const std::string& args) {
  const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const fs::path& path) { return json::parse(slurp(path)); }

json strip_volatile(json j) {
  j.erase("wallclock_seconds");
  j.erase("provenance");
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::printf("usage: test_cli <postel binary>\n");
    return 2;
  }
  cli = argv[1];
  work = fs::temp_directory_path() / ("postel_cli_test_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);

  // --- smooth on the triangle fixture -------------------------------------
  write_text(work / "tri_edges.txt", "0 1\n1 2\n0 2\n");
  write_text(work / "tri_labels.csv", "node,label\n0,0\n1,0\n2,1\n");

  CHECK(run("smooth --graph " + (work / "tri_edges.txt").string() + " --labels " +
            (work / "tri_labels.csv").string() + " --alpha 1 --beta 0 -o " +
            (work / "soft.csv").string()) == 0);
  {
    const postel::Matrix soft = postel::read_soft_labels_csv((work / "soft.csv").string(), 3);
    CHECK(std::abs(soft(2, 0) - 1.0 / 3) < 1e-12);
    CHECK(std::abs(soft(2, 1) - 2.0 / 3) < 1e-12);
  }

  CHECK(run("smooth --graph " + (work / "tri_edges.txt").string() + " --labels " +
            (work / "tri_labels.csv").string() + " --alpha 0 -o " +
            (work / "onehot.csv").string()) == 0);
  {
    const postel::Matrix soft =
        postel::read_soft_labels_csv((work / "onehot.csv").string(), 3);
    const std::vector<int> expect{0, 0, 1};
    for (int i = 0; i < 3; ++i) {
      CHECK(soft(i, expect[i]) == 1.0);
      CHECK(soft(i, 1 - expect[i]) == 0.0);
    }
  }

  // Missing labels file -> input error.
  CHECK(run("smooth --graph " + (work / "tri_edges.txt").string() +
            " --labels /nonexistent.csv -o " + (work / "x.csv").string()) == 2);
  // Malformed edge file -> input error.
  write_text(work / "bad_edges.txt", "0 1\nnot an edge\n");
  CHECK(run("smooth --graph " + (work / "bad_edges.txt").string() + " --labels " +
            (work / "tri_labels.csv").string() + " -o " + (work / "x.csv").string()) == 2);
  // Labels present but none usable -> statistics error.
  write_text(work / "empty_labels.csv", "node,label\n");
  CHECK(run("smooth --graph " + (work / "tri_edges.txt").string() + " --labels " +
            (work / "empty_labels.csv").string() + " --classes 2 -o " +
            (work / "x.csv").string()) == 3);

  // --- gen-synth ------------------------------------------------------------
  const fs::path bundle = work / "bundle";
  CHECK(run("gen-synth --nodes 500 --classes 2 --homophily 0.8,0.8 --avg-degree 10"
            " --feature-dim 4 --signal 1.5 --seed 7 --out-dir " +
            bundle.string()) == 0);
  {
    const auto edges = postel::read_edge_list((bundle / "edges.txt").string());
    const postel::Graph g = postel::build_graph(500, edges);
    const auto labels = postel::read_labels_csv((bundle / "labels.csv").string(), 500);
    postel::LabelState state = postel::LabelState::unlabeled(500, 2);
    for (std::size_t i = 0; i < 500; ++i) state.set_ground_truth(i, labels[i]);
    const auto c = postel::class_homophily(g, state);
    CHECK(c[0] >= 0.75);
    CHECK(c[0] <= 0.85);
    CHECK(c[1] >= 0.75);
    CHECK(c[1] <= 0.85);
    const postel::Split split = postel::read_split_csv((bundle / "split.csv").string(), 500);
    CHECK(split.train.size() == 300);
    CHECK(split.val.size() == 100);
    CHECK(split.test.size() == 100);
  }
  CHECK(run("gen-synth --nodes 100 --classes 2 --homophily 1.0,1.0 --out-dir " +
            (work / "nope").string()) == 5);

  // --- verify ----------------------------------------------------------------
  CHECK(run("verify --suite lemmas --max-degree 20") == 0);
  CHECK(run("verify --suite oracle --trials 150 --output " +
            (work / "verify.json").string()) == 0);
  {
    const json report = load_json(work / "verify.json");
    CHECK(report["violations"].empty());
    CHECK(report["cases_checked"].get<int>() > 0);
  }
  CHECK(run("verify --suite oracle --trials 50 --inject-corruption") == 1);
  CHECK(run("verify --suite independence") == 0);

  // --- run -------------------------------------------------------------------
  const fs::path small = work / "small";
  CHECK(run("gen-synth --nodes 120 --classes 2 --homophily 0.75,0.75 --avg-degree 8"
            " --feature-dim 4 --signal 1.5 --seed 3 --out-dir " +
            small.string()) == 0);
  const std::string common = " --graph " + (small / "edges.txt").string() + " --labels " +
                             (small / "labels.csv").string() + " --features " +
                             (small / "features.csv").string() + " --split " +
                             (small / "split.csv").string() +
                             " --epochs 40 --patience 20 --hidden 8 --seed 11";

  const fs::path out_a = work / "run_a";
  CHECK(run("run" + common + " --max-iters 2 --out-dir " + out_a.string()) == 0);
  const json first = load_json(out_a / "result.json");
  CHECK(run("run" + common + " --max-iters 2 --out-dir " + out_a.string()) == 0);
  const json second = load_json(out_a / "result.json");
  CHECK(strip_volatile(first) == strip_volatile(second));
  CHECK(first["iterations"].size() == first["iterations_used"].get<std::size_t>() + 1);

  // --no-iterate output equals --max-iters 0 output.
  const fs::path out_b = work / "run_b";
  const fs::path out_c = work / "run_c";
  CHECK(run("run" + common + " --no-iterate --out-dir " + out_b.string()) == 0);
  CHECK(run("run" + common + " --max-iters 0 --out-dir " + out_c.string()) == 0);
  const json no_iter = strip_volatile(load_json(out_b / "result.json"));
  const json zero_iter = strip_volatile(load_json(out_c / "result.json"));
  CHECK(no_iter == zero_iter);
  CHECK(no_iter["iterations_used"].get<int>() == 0);

  // --label-fraction flows into the counted statistics.
  const fs::path out_d = work / "run_d";
  CHECK(run("run" + common + " --no-iterate --label-fraction 0.1 --out-dir " +
            out_d.string()) == 0);
  {
    const json sparse = load_json(out_d / "result.json");
    const postel::Split split = postel::read_split_csv((small / "split.csv").string(), 120);
    const std::size_t expect = static_cast<std::size_t>(
        std::ceil(0.1 * static_cast<double>(split.train.size())));
    CHECK(sparse["iterations"][0]["stats"]["counted_nodes"].get<std::size_t>() == expect);
  }

  // --- sweep -------------------------------------------------------------------
  const fs::path out_e = work / "sweep";
  CHECK(run("sweep" + common + " --no-iterate --alpha-grid 0.4 --beta-grid 0.2 --out-dir " +
            out_e.string()) == 0);
  {
    const json best = load_json(out_e / "best_config.json");
    const fs::path out_f = work / "run_f";
    CHECK(run("run" + common + " --no-iterate --alpha 0.4 --beta 0.2 --out-dir " +
              out_f.string()) == 0);
    const json same = load_json(out_f / "result.json");
    CHECK(best["best_val_loss"].get<double>() ==
          same["iterations"][0]["val_loss"].get<double>());
    CHECK(best["test_accuracy"].get<double>() ==
          same["final_test_accuracy"].get<double>());
    // One row of data plus provenance and header.
    std::ifstream table(out_e / "sweep.csv");
    std::string line;
    int rows = 0;
    while (std::getline(table, line))
      if (!line.empty() && line[0] != '#' && line.rfind("alpha", 0) != 0) ++rows;
    CHECK(rows == 1);
  }

  // Default grids produce the full 10x10 table.
  const fs::path out_g = work / "sweep_full";
  CHECK(run("sweep" + common + " --no-iterate --out-dir " + out_g.string()) == 0);
  {
    std::ifstream table(out_g / "sweep.csv");
    std::string line;
    int rows = 0;
    while (std::getline(table, line))
      if (!line.empty() && line[0] != '#' && line.rfind("alpha", 0) != 0) ++rows;
    CHECK(rows == 100);
  }

  // --- config file precedence: flags > config > defaults ----------------------
  write_text(work / "exp.conf", "smooth.alpha=1\nsmooth.beta=0\n");
  CHECK(run("smooth --graph " + (work / "tri_edges.txt").string() + " --labels " +
            (work / "tri_labels.csv").string() + " --config " +
            (work / "exp.conf").string() + " -o " + (work / "cfg.csv").string()) == 0);
  {
    // alpha=1, beta=0 from the config: node 2 keeps its raw posterior.
    const postel::Matrix soft = postel::read_soft_labels_csv((work / "cfg.csv").string(), 3);
    CHECK(std::abs(soft(2, 1) - 2.0 / 3) < 1e-12);
  }
  CHECK(run("smooth --graph " + (work / "tri_edges.txt").string() + " --labels " +
            (work / "tri_labels.csv").string() + " --config " +
            (work / "exp.conf").string() + " --alpha 0 -o " +
            (work / "cfg2.csv").string()) == 0);
  {
    const postel::Matrix soft =
        postel::read_soft_labels_csv((work / "cfg2.csv").string(), 3);
    CHECK(soft(2, 1) == 1.0);  // flag overrides the config's alpha=1
  }

  // --- training divergence -> exit 4 ------------------------------------------
  CHECK(run("run" + common + " --no-iterate --lr 1e200 --out-dir " +
            (work / "diverge").string()) == 4);

  if (failures == 0) {
    std::printf("test_cli: all checks passed\n");
    fs::remove_all(work);
    return 0;
  }
  std::printf("test_cli: %d failures (artifacts in %s)\n", failures, work.c_str());
  return 1;
}
