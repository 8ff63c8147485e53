#include "blursynth/dataset/cli.hpp"

#include <chrono>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blursynth/dataset/config.hpp"
#include "blursynth/dataset/pipeline.hpp"

namespace blursynth::dataset {

namespace {

struct SynthesizeArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool baseline_rgb = false;
  std::optional<int> factor;
  std::optional<std::string> out;
  std::optional<int> workers;
};

struct EvaluateArgs {
  std::string pred;
  std::string gt;
  std::vector<std::string> partitions;
  std::optional<std::string> csv;
};

int do_synthesize(const SynthesizeArgs& args, std::ostream& out,
                  std::ostream& err) {
  JobConfig cfg;
  std::vector<SequenceSource> sources;
  try {
    cfg = load_config(args.config);
    if (args.seed) cfg.seed = *args.seed;
    if (args.baseline_rgb) cfg.baseline_rgb = true;
    if (args.factor) cfg.factor = *args.factor;
    if (args.out) cfg.output_root = *args.out;
    if (args.workers) cfg.workers = *args.workers;
    cfg.validate();
    sources = ingest(cfg.input_root, cfg.frame_rate, &err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  const auto t0 = std::chrono::steady_clock::now();
  SynthesisSummary summary;
  try {
    summary = synthesize(cfg, sources, &err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << "wrote " << summary.pairs << " pairs from " << sources.size()
      << " sequences in " << secs << " s\n"
      << "manifest: " << summary.manifest_path.string() << '\n';
  if (summary.failed_sequences > 0) {
    err << summary.failed_sequences << " sequence(s) failed; see manifest\n";
    return kExitPartial;
  }
  return kExitOk;
}

int do_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  EvaluationReport report;
  try {
    report = evaluate(args.pred, args.gt, args.partitions);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  print_table(report, out);
  if (args.csv) {
    std::ofstream csv(*args.csv);
    if (!csv) {
      err << "error: cannot write " << *args.csv << '\n';
      return kExitValidation;
    }
    write_csv(report, csv);
  }
  if (!report.unmatched.empty()) {
    err << report.unmatched.size()
        << " unmatched file(s) excluded from the averages\n";
    return kExitPartial;
  }
  return kExitOk;
}

int do_inspect(const std::string& manifest, std::ostream& out, std::ostream& err) {
  try {
    print_summary(inspect(read_manifest(manifest)), out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"RAW-domain motion blur dataset synthesis and evaluation"};
  app.require_subcommand(1);

  SynthesizeArgs syn;
  auto* syn_cmd = app.add_subcommand("synthesize", "Generate blurry/sharp pairs");
  syn_cmd->add_option("--config", syn.config, "TOML job file")->required();
  syn_cmd->add_option("--seed", syn.seed, "Master seed (overrides config)");
  syn_cmd->add_flag("--baseline-rgb", syn.baseline_rgb,
                    "Also emit RGB-domain averaged pairs");
  syn_cmd->add_option("--factor", syn.factor, "Frame-rate upsampling factor");
  syn_cmd->add_option("--out", syn.out, "Output directory");
  syn_cmd->add_option("--workers", syn.workers, "Worker threads");

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
  ev_cmd->add_option("--pred", ev.pred, "Directory of predicted images")->required();
  ev_cmd->add_option("--gt", ev.gt, "Directory of ground-truth images")->required();
  ev_cmd->add_option("--partitions", ev.partitions, "Filename prefixes")->delimiter(',');
  ev_cmd->add_option("--csv", ev.csv, "Write the tables as CSV");

  std::string manifest;
  auto* in_cmd = app.add_subcommand("inspect", "Summarize a manifest");
  in_cmd->add_option("--manifest", manifest, "manifest.jsonl")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (*syn_cmd) return do_synthesize(syn, out, err);
  if (*ev_cmd) return do_evaluate(ev, out, err);
  return do_inspect(manifest, out, err);
}

}  // namespace blursynth::dataset
