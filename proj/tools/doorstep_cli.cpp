// doorstep: generate scenes, run delivery trials, aggregate and render them.

#include "doorstep/config.hpp"
#include "doorstep/harness.hpp"
#include "doorstep/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace doorstep;

namespace {

struct Overrides {
  std::string config_path;
  std::vector<std::string> sets;  // key=value
  std::optional<int> corpus_size;
  std::optional<std::uint64_t> master_seed;
  std::optional<int> threads;

  void add(CLI::App* app) {
    app->add_option("-c,--config", config_path, "Config file (key = value lines)")->check(CLI::ExistingFile);
    app->add_option("--corpus-size", corpus_size, "Number of houses");
    app->add_option("--master-seed", master_seed, "Master seed");
    app->add_option("-j,--threads", threads, "Worker threads");
    app->add_option("-s,--set", sets, "Override any config key, e.g. --set frontier_time_cap=120");
  }

  ExperimentConfig load() const {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (corpus_size) cfg.corpus_size = *corpus_size;
    if (master_seed) cfg.master_seed = *master_seed;
    if (threads) cfg.threads = *threads;
    cfg.validate();
    return cfg;
  }
};

void print_summary(const Report& rep) {
  std::printf("%-9s %-17s %6s %9s %9s %9s %8s\n", "method", "target", "trials", "delivered", "mean_s", "stddev_s",
              "timeouts");
  for (const MethodStats& s : rep.stats) {
    std::printf("%-9s %-17s %6d %9d %9.2f %9.2f %8d\n", std::string(to_string(s.method)).c_str(),
                std::string(to_string(s.target)).c_str(), s.trials, s.delivered, s.mean_elapsed, s.stddev_elapsed,
                s.timeouts);
  }
  if (rep.speedup > 0.0) {
    std::printf("speedup (frontier mean / proposed mean): %.3f  (%.1f%% faster)\n", rep.speedup,
                (rep.speedup - 1.0) * 100.0);
  }
}

std::vector<TrialResult> read_trials(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return read_trials_jsonl(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string svg_name(const TrialResult& t) {
  return "seed_" + std::to_string(t.seed) + "_" + std::string(to_string(t.method)) + "_" + std::string(to_string(t.target)) +
         ".svg";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Marker-free last-mile drone delivery simulator"};
  app.require_subcommand(1);

  // generate
  Overrides gen_over;
  std::string gen_out = "worlds";
  std::optional<std::uint64_t> gen_seed;
  CLI::App* gen = app.add_subcommand("generate", "Write the corpus scenes as world JSON");
  gen_over.add(gen);
  gen->add_option("-o,--out", gen_out, "Output directory");
  gen->add_option("--seed", gen_seed, "Write only the world with this seed");

  // run
  Overrides run_over;
  std::string run_out = "results";
  bool run_svg = false;
  bool quiet = false;
  CLI::App* run = app.add_subcommand("run", "Run all trials of the corpus and write trials and reports");
  run_over.add(run);
  run->add_option("-o,--out", run_out, "Output directory");
  run->add_flag("--svg", run_svg, "Also render every trial into <out>/svg");
  run->add_flag("-q,--quiet", quiet, "No per-trial progress");

  // report
  std::string rep_trials;
  std::string rep_out = ".";
  CLI::App* rep = app.add_subcommand("report", "Aggregate a trials.jsonl log into report.csv / report.json");
  rep->add_option("trials", rep_trials, "trials.jsonl")->required()->check(CLI::ExistingFile);
  rep->add_option("-o,--out", rep_out, "Output directory");

  // render
  Overrides ren_over;
  std::string ren_trials;
  std::string ren_out = "svg";
  std::string ren_world;
  std::vector<int> ren_index;
  CLI::App* ren = app.add_subcommand("render", "Render trials from a trials.jsonl log as SVG");
  ren_over.add(ren);
  ren->add_option("trials", ren_trials, "trials.jsonl")->required()->check(CLI::ExistingFile);
  ren->add_option("-o,--out", ren_out, "Output directory");
  ren->add_option("-w,--world", ren_world, "World JSON to draw instead of regenerating from the config")
      ->check(CLI::ExistingFile);
  ren->add_option("-i,--index", ren_index, "Line numbers (0-based) to render; default all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const ExperimentConfig cfg = gen_over.load();
      fs::create_directories(gen_out);
      std::vector<std::uint64_t> seeds;
      if (gen_seed) {
        seeds.push_back(*gen_seed);
      } else {
        for (int i = 0; i < cfg.corpus_size; ++i) seeds.push_back(corpus_seed(cfg.master_seed, i));
      }
      for (std::uint64_t s : seeds) {
        const fs::path p = fs::path(gen_out) / ("world_" + std::to_string(s) + ".json");
        save_world(p.string(), make_world(s, cfg));
        std::cout << p.string() << '\n';
      }
    } else if (*run) {
      const ExperimentConfig cfg = run_over.load();
      const auto t0 = std::chrono::steady_clock::now();
      const Report report = run_corpus(cfg, run_out, [&](const TrialResult& t) {
        if (quiet) return;
        std::fprintf(stderr, "seed %llu %-8s %-17s %-15s %7.1f s\n", static_cast<unsigned long long>(t.seed),
                     std::string(to_string(t.method)).c_str(), std::string(to_string(t.target)).c_str(),
                     std::string(to_string(t.status)).c_str(), t.elapsed);
      });
      print_summary(report);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::fprintf(stderr, "wall time %.1f s, results in %s\n", wall, run_out.c_str());
      if (run_svg) {
        const fs::path dir = fs::path(run_out) / "svg";
        fs::create_directories(dir);
        for (const TrialResult& t : read_trials((fs::path(run_out) / "trials.jsonl").string())) {
          if (t.trajectory.empty()) continue;
          emit_trajectory_svg(t, make_world(t.seed, cfg), (dir / svg_name(t)).string());
        }
      }
    } else if (*rep) {
      const Report report = summarize(read_trials(rep_trials));
      fs::create_directories(rep_out);
      for (const char* name : {"report.csv", "report.json"}) {
        const fs::path p = fs::path(rep_out) / name;
        std::ofstream out(p);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        if (std::string(name) == "report.csv") {
          write_report_csv(out, report);
        } else {
          write_report_json(out, report);
        }
      }
      print_summary(report);
    } else if (*ren) {
      const ExperimentConfig cfg = ren_over.load();
      const std::vector<TrialResult> trials = read_trials(ren_trials);
      std::optional<WorldModel> fixed;
      if (!ren_world.empty()) fixed = load_world(ren_world);
      std::vector<int> which = ren_index;
      if (which.empty()) {
        for (int i = 0; i < static_cast<int>(trials.size()); ++i) which.push_back(i);
      }
      fs::create_directories(ren_out);
      for (int i : which) {
        if (i < 0 || i >= static_cast<int>(trials.size())) throw std::out_of_range("no trial at index " + std::to_string(i));
        const TrialResult& t = trials[i];
        const WorldModel w = fixed ? *fixed : make_world(t.seed, cfg);
        const fs::path p = fs::path(ren_out) / svg_name(t);
        emit_trajectory_svg(t, w, p.string());
        std::cout << p.string() << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
