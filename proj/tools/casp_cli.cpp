// Command-line driver: `run`, `grid` and `subset` experiments.

#include <algorithm>
#include <cstdio>
#include <functional>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "casp/runner.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string seeds = "0";
  std::string out = "-";
  std::string format = "csv";
  bool dump_traces = false;
  bool dump_buffer = false;
  bool timing = false;
  std::optional<double> ood_sigma;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Experiment config file (key = value)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seeds", o.seeds, "Seeds: a..b, a,b,c or a single value");
  cmd->add_option("--out", o.out, "Output path ('-' for stdout)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--dump-traces", o.dump_traces, "Write per-task surrogate confidence traces");
  cmd->add_flag("--dump-buffer", o.dump_buffer, "Write per-task buffer snapshots");
  cmd->add_flag("--timing", o.timing, "Report wall-clock time in wall_ms");
  cmd->add_option("--ood-sigma", o.ood_sigma, "Gaussian noise scale for OOD accuracy");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    out.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

casp::ExperimentConfig base_config(const CommonOptions& o) {
  casp::ExperimentConfig cfg =
      o.config_path.empty() ? casp::ExperimentConfig{} : casp::load_experiment_config(o.config_path);
  if (o.ood_sigma) cfg.ood_sigma = *o.ood_sigma;
  cfg.record_wall_time = o.timing;
  cfg.validate();
  return cfg;
}

std::filesystem::path dump_prefix(const CommonOptions& o) {
  if (o.out == "-") return "casp";
  std::filesystem::path p(o.out);
  return p.parent_path() / p.stem();
}

std::function<casp::RunObserver(std::uint64_t)> make_observer(const CommonOptions& o) {
  if (!o.dump_traces && !o.dump_buffer) return {};
  const auto prefix = dump_prefix(o).string();
  const bool traces = o.dump_traces;
  const bool buffer = o.dump_buffer;
  return [=](std::uint64_t seed) {
    casp::RunObserver obs;
    const std::string stem = prefix + ".seed" + std::to_string(seed);
    if (traces) {
      obs.on_trace = [stem](int task, const casp::ConfidenceTrace& trace) {
        trace.dump(stem + ".task" + std::to_string(task) + ".trace.csv");
      };
    }
    if (buffer) {
      obs.on_buffer = [stem](int task, const casp::ReplayBuffer& buf) {
        buf.dump(stem + ".task" + std::to_string(task) + ".buffer.csv");
      };
    }
    return obs;
  };
}

void write_rows(const CommonOptions& o, const std::vector<casp::ResultRow>& rows) {
  const auto format = casp::parse_result_format(o.format);
  if (o.out == "-") {
    std::cout << casp::format_results(rows, format);
  } else {
    casp::emit_results(rows, o.out, format);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Class-adaptive replay buffer experiments"};
  app.require_subcommand(1);

  CommonOptions run_opts, grid_opts, subset_opts;

  auto* run = app.add_subcommand("run", "Run the configured method once per seed");
  add_common(run, run_opts);

  auto* grid = app.add_subcommand("grid", "Class strategy x sample strategy grid");
  add_common(grid, grid_opts);
  std::string class_list = "challenging,hard,simple,balanced";
  std::string sample_list = "challenging,hard,simple,random";
  grid->add_option("--class-strategies", class_list,
                   "Comma list of challenging,hard,simple,balanced,nopolicy");
  grid->add_option("--sample-strategies", sample_list,
                   "Comma list of challenging,hard,simple,random");

  auto* subset = app.add_subcommand("subset", "Offline training on a scored subset");
  add_common(subset, subset_opts);
  double fraction = 0.1;
  std::string categories = "challenging,hard,simple,random";
  subset->add_option("--fraction", fraction, "Retained fraction of the training set");
  subset->add_option("--categories", categories, "Comma list of simple,hard,challenging,random");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto cfg = base_config(run_opts);
      const auto seeds = casp::parse_seed_list(run_opts.seeds);
      write_rows(run_opts, casp::run_seeds(cfg, seeds, make_observer(run_opts)));
    } else if (grid->parsed()) {
      if (grid_opts.dump_traces || grid_opts.dump_buffer) {
        std::cerr << "note: --dump-traces/--dump-buffer apply to `run` only\n";
      }
      const auto cfg = base_config(grid_opts);
      const auto seeds = casp::parse_seed_list(grid_opts.seeds);
      std::vector<casp::ClassStrategy> cs;
      for (const auto& s : split_list(class_list)) cs.push_back(casp::parse_class_strategy(s));
      std::vector<casp::SampleStrategy> ss;
      for (const auto& s : split_list(sample_list)) ss.push_back(casp::parse_sample_strategy(s));
      write_rows(grid_opts, casp::run_grid(cfg, cs, ss, seeds));
    } else if (subset->parsed()) {
      auto cfg = base_config(subset_opts);
      cfg.method = casp::Method::OfflineSubset;
      cfg.subset_fraction = fraction;
      const auto seeds = casp::parse_seed_list(subset_opts.seeds);
      std::vector<casp::ResultRow> rows;
      for (const auto& name : split_list(categories)) {
        cfg.subset_category = casp::parse_subset_category(name);
        auto part = casp::run_seeds(cfg, seeds);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.method != b.method ? a.method < b.method : a.seed < b.seed;
      });
      write_rows(subset_opts, rows);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
