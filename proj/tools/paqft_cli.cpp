// Batch front end: loads a JSON run configuration, executes named
// computations and verification suites, writes JSON/CSV artifacts and a
// machine-readable pass/fail report.
//
// Exit codes: 0 all tasks passed, 1 numerical suite failure,
//             2 configuration/schema error, 3 I/O failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "paqft/propagators.hpp"
#include "paqft/suites.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct TaskSpec {
  std::string type;  // "suite" | "export_kernel"
  std::string name;  // suite name
  std::string kind;  // kernel kind
  std::string format = "json";
  std::string path;
  double beta = 1.0;
};

struct RunConfig {
  paqft::GridConfig grid;
  paqft::StateKind state = paqft::StateKind::Vacuum;
  double beta = 1.0;
  std::uint64_t seed = 12345;
  paqft::TruncationOrders orders{3, 4};
  int degree_bound = 6;
  paqft::InteractionConfig interaction;
  std::string output_dir = "out";
  std::vector<TaskSpec> tasks;
};

RunConfig parse_config(const json& j) {
  RunConfig cfg;
  if (!j.contains("grid")) throw paqft::ConfigError("grid", "missing grid section");
  cfg.grid = paqft::GridConfig::from_json(j.at("grid"));
  if (j.contains("state")) {
    const auto& s = j.at("state");
    std::string kind = s.value("kind", "vacuum");
    if (kind == "vacuum") {
      cfg.state = paqft::StateKind::Vacuum;
    } else if (kind == "kms") {
      cfg.state = paqft::StateKind::Kms;
      if (!s.contains("beta")) throw paqft::ConfigError("state.beta", "KMS state needs beta");
      cfg.beta = s.at("beta").get<double>();
      if (!(cfg.beta > 0)) throw paqft::ConfigError("state.beta", "beta must be positive");
    } else {
      throw paqft::ConfigError("state.kind", "unknown state kind '" + kind + "'");
    }
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("truncation")) {
    const auto& t = j.at("truncation");
    cfg.orders.lambda_max = t.value("lambda_max", 3);
    cfg.orders.hbar_max = t.value("hbar_max", 4);
    if (cfg.orders.lambda_max < 0 || cfg.orders.hbar_max < 0)
      throw paqft::ConfigError("truncation", "orders must be nonnegative");
  }
  if (j.contains("degree_bound")) cfg.degree_bound = j.at("degree_bound").get<int>();
  if (j.contains("interaction")) {
    const auto& ij = j.at("interaction");
    std::string kind = ij.value("kind", "phi4");
    if (kind != "phi4")
      throw paqft::ConfigError("interaction.kind", "unknown interaction kind '" + kind + "'");
    cfg.interaction.set = true;
    cfg.interaction.coupling = ij.value("coupling", 1.0);
    cfg.interaction.lambda_orders = ij.value("lambda_orders", 2);
    if (cfg.interaction.lambda_orders < 1 || cfg.interaction.lambda_orders > 3)
      throw paqft::ConfigError("interaction.lambda_orders", "kept orders must be 1..3");
    if (!ij.contains("window"))
      throw paqft::ConfigError("interaction.window", "interaction needs a window box");
    const auto& wj = ij.at("window");
    cfg.interaction.t_lo = wj.value("t_lo", 0);
    cfg.interaction.t_hi = wj.value("t_hi", 0);
    cfg.interaction.x_lo = wj.value("x_lo", 0);
    cfg.interaction.x_hi = wj.value("x_hi", 0);
    if (cfg.interaction.t_lo > cfg.interaction.t_hi ||
        cfg.interaction.t_lo < cfg.grid.margin ||
        cfg.interaction.t_hi > cfg.grid.nt - 1 - cfg.grid.margin)
      throw paqft::ConfigError("interaction.window",
                               "window box must lie inside the time margins");
  }
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("tasks")) {
    if (!j.at("tasks").is_array()) throw paqft::ConfigError("tasks", "tasks must be an array");
    int idx = 0;
    for (const auto& tj : j.at("tasks")) {
      std::string base = "tasks[" + std::to_string(idx++) + "]";
      TaskSpec t;
      t.type = tj.value("type", "");
      if (t.type == "suite") {
        if (!tj.contains("name")) throw paqft::ConfigError(base + ".name", "suite task needs a name");
        t.name = tj.at("name").get<std::string>();
        bool known = false;
        for (const auto& n : paqft::list_suites()) known = known || n == t.name;
        if (!known) throw paqft::ConfigError(base + ".name", "unknown suite '" + t.name + "'");
      } else if (t.type == "export_kernel") {
        if (!tj.contains("kind"))
          throw paqft::ConfigError(base + ".kind", "export task needs a kernel kind");
        t.kind = tj.at("kind").get<std::string>();
        t.format = tj.value("format", "json");
        if (t.format != "json" && t.format != "csv")
          throw paqft::ConfigError(base + ".format", "format must be json or csv");
        t.path = tj.value("path", t.kind + "." + t.format);
        t.beta = tj.value("beta", cfg.beta);
      } else {
        throw paqft::ConfigError(base + ".type", "unknown task type '" + t.type + "'");
      }
      cfg.tasks.push_back(std::move(t));
    }
  }
  return cfg;
}

paqft::KernelPtr kernel_by_name(const paqft::SpectralPtr& K, const std::string& kind,
                                double beta) {
  using paqft::KernelKind;
  using paqft::StateKind;
  paqft::TwoPointParams pr;
  if (kind == "retarded") return make_kernel(K, KernelKind::Retarded);
  if (kind == "advanced") return make_kernel(K, KernelKind::Advanced);
  if (kind == "pauli_jordan") return make_kernel(K, KernelKind::PauliJordan);
  if (kind == "wightman_vacuum") return make_kernel(K, KernelKind::Wightman);
  if (kind == "wightman_kms") return make_kernel(K, KernelKind::Wightman, {StateKind::Kms, beta});
  if (kind == "dirac") return make_kernel(K, KernelKind::Dirac);
  if (kind == "feynman") return make_kernel(K, KernelKind::Feynman, pr);
  if (kind == "hadamard_H") return make_kernel(K, KernelKind::HadamardH, pr);
  throw paqft::ConfigError("tasks.kind", "unknown kernel kind '" + kind + "'");
}

int run_command(const std::string& config_path, const std::string& out_override,
                long long seed_override, const std::vector<std::string>& suite_override) {
  json j;
  {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config " << config_path << "\n";
      return 3;
    }
    try {
      in >> j;
    } catch (const json::exception& e) {
      std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
      return 2;
    }
  }

  RunConfig cfg;
  paqft::SuiteContext ctx;
  try {
    cfg = parse_config(j);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (!suite_override.empty()) {
      cfg.tasks.clear();
      for (const auto& name : suite_override) {
        bool known = false;
        for (const auto& n : paqft::list_suites()) known = known || n == name;
        if (!known) throw paqft::ConfigError("--suite", "unknown suite '" + name + "'");
        TaskSpec t;
        t.type = "suite";
        t.name = name;
        cfg.tasks.push_back(t);
      }
    }
    ctx.grid = paqft::build_grid(cfg.grid);
    ctx.K = paqft::assemble_K(ctx.grid);
    ctx.state = cfg.state;
    ctx.beta = cfg.beta;
    ctx.seed = cfg.seed;
    ctx.orders = cfg.orders;
    ctx.degree_bound = cfg.degree_bound;
    ctx.interaction = cfg.interaction;
  } catch (const paqft::ConfigError& e) {
    std::cerr << "config error at '" << e.field << "': " << e.what() << "\n";
    return 2;
  }

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << cfg.output_dir << "\n";
    return 3;
  }

  ordered_json report;
  report["config"] = j;
  report["seed"] = cfg.seed;
  auto now = std::chrono::system_clock::now().time_since_epoch();
  report["generated_at"] =
      std::chrono::duration_cast<std::chrono::seconds>(now).count();
  auto suite_reports = ordered_json::array();
  auto artifacts = ordered_json::array();
  bool all_pass = true;

  for (const auto& t : cfg.tasks) {
    try {
      if (t.type == "suite") {
        paqft::Report r = paqft::run_suite(t.name, ctx);
        bool ok = r.passed();
        all_pass = all_pass && ok;
        suite_reports.push_back(r.to_json());
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << t.name
                  << " (max deviation " << r.max_deviation() << ")\n";
      } else if (t.type == "export_kernel") {
        auto ker = kernel_by_name(ctx.K, t.kind, t.beta);
        fs::path path = fs::path(cfg.output_dir) / t.path;
        if (t.format == "json") {
          std::ofstream out(path);
          if (!out) throw std::ios_base::failure("cannot open " + path.string());
          out << ker->to_json().dump(1) << "\n";
        } else {
          ker->write_csv_dense(path.string());
        }
        artifacts.push_back({{"kind", t.kind}, {"path", path.string()}});
        std::cout << "[OK]   exported " << t.kind << " -> " << path.string() << "\n";
      }
    } catch (const paqft::ConfigError& e) {
      std::cerr << "config error at '" << e.field << "': " << e.what() << "\n";
      return 2;
    } catch (const std::ios_base::failure& e) {
      std::cerr << "i/o error: " << e.what() << "\n";
      return 3;
    } catch (const std::exception& e) {
      ordered_json err;
      err["suite"] = t.type == "suite" ? t.name : t.kind;
      err["passed"] = false;
      err["error"] = e.what();
      suite_reports.push_back(err);
      all_pass = false;
      std::cout << "[FAIL] " << (t.type == "suite" ? t.name : t.kind) << ": " << e.what()
                << "\n";
    }
  }

  report["suites"] = suite_reports;
  report["artifacts"] = artifacts;
  report["passed"] = all_pass;
  fs::path rp = fs::path(cfg.output_dir) / "report.json";
  std::ofstream out(rp);
  if (!out) {
    std::cerr << "error: cannot write " << rp.string() << "\n";
    return 3;
  }
  out << report.dump(1) << "\n";
  std::cout << (all_pass ? "all tasks passed" : "FAILURES present") << "; report at "
            << rp.string() << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"propagators, deformation quantization and verification suites for the"
               " lattice scalar field"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute the tasks of a JSON run configuration");
  std::string config_path, out_dir;
  long long seed = -1;
  std::vector<std::string> suites;
  run->add_option("config", config_path, "path to the run configuration")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_option("--seed", seed, "seed override for randomized suites");
  run->add_option("--suite", suites, "run only the named suites (repeatable)");

  auto* ls = app.add_subcommand("list-suites", "print the available verification suites");

  CLI11_PARSE(app, argc, argv);

  if (ls->parsed()) {
    for (const auto& n : paqft::list_suites()) std::cout << n << "\n";
    return 0;
  }
  return run_command(config_path, out_dir, seed, suites);
}
