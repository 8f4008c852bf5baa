// Command-line front end: gen-data, fit-tokenizer, train, evaluate, run,
// and single-shot generate. Exit codes: 0 success, 2 configuration error,
// 3 runtime error.

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "maskvid/decoder.hpp"
#include "maskvid/errors.hpp"
#include "maskvid/experiment.hpp"
#include "maskvid/io.hpp"
#include "maskvid/kvconfig.hpp"
#include "maskvid/metrics.hpp"
#include "maskvid/run_config.hpp"

namespace fs = std::filesystem;
using namespace maskvid;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "run config file (key = value)");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the config seed");
}

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = args.config_path.empty()
                      ? RunConfig::defaults()
                      : RunConfig::from_file(args.config_path);
  if (args.seed) {
    cfg.seed = *args.seed;
    cfg.validate();
  }
  return cfg;
}

void print_report(const EvalReport& report) {
  for (const TaskEval& te : report.tasks)
    std::printf("%-4s accuracy %.4f  psnr %6.2f dB\n",
                std::string(task_name(te.task)).c_str(), te.accuracy,
                te.psnr_db);
  if (!report.loss_curve.empty())
    std::printf("loss %.4f -> %.4f over %zu steps\n",
                report.loss_curve.front().total,
                report.loss_curve.back().total, report.loss_curve.size());
  if (report.wall_clock_seconds > 0.0)
    std::printf("wall clock %.2f s\n", report.wall_clock_seconds);
}

struct GenerateArgs {
  std::string config_path;
  std::string artifacts_dir = "out";
  std::string in_path;
  std::string out_path = "generated.mgvd";
  std::string trace_dir;
  std::optional<std::string> task;
  std::optional<int> steps;
  std::optional<double> temperature;
  std::optional<std::string> schedule;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> class_label;
};

int run_generate(const GenerateArgs& args) {
  RunConfig cfg = args.config_path.empty()
                      ? RunConfig::defaults()
                      : RunConfig::from_file(args.config_path);
  if (args.task) cfg.task.kind = task_from_name(*args.task);
  if (args.steps) cfg.decode.steps = *args.steps;
  if (args.temperature) cfg.decode.temperature = *args.temperature;
  if (args.schedule) cfg.decode.schedule.kind = schedule_from_name(*args.schedule);
  if (args.seed) cfg.seed = *args.seed;
  if (args.class_label) cfg.task.class_label = *args.class_label;
  cfg.validate();

  const GridShape shape = cfg.grid_shape();
  const VocabularyLayout vocab = cfg.vocab();
  const fs::path artifacts(args.artifacts_dir);
  const Codebook cb = read_codebook(artifacts / "codebook.mgcb");

  std::optional<VideoTensor> input;
  if (!args.in_path.empty()) input = read_video(args.in_path);
  if (!input && cfg.task.kind != TaskKind::CG)
    throw ConfigError("--in is required for every task except CG");

  TaskSpec spec = cfg.task_for(cfg.task.kind, cfg.task.class_label);
  if (task_uses_class(spec.kind) && !spec.class_label)
    throw ConfigError("--class is required for CG and CFP");

  std::unique_ptr<TokenPredictor> predictor;
  if (cfg.predictor_kind == PredictorKind::Potts) {
    predictor = std::make_unique<PottsPredictor>(
        read_params(artifacts / "predictor.mgpt"));
  } else {
    if (!input)
      throw ConfigError("the oracle predictor needs an input video");
    predictor = std::make_unique<OraclePredictor>(encode(*input, cb, shape),
                                                  cfg.v_vis,
                                                  cfg.oracle_epsilon);
  }

  DecodeConfig decode_cfg = cfg.decode;
  decode_cfg.seed = derive_seed(cfg.decode_seed(), 0);
  const GenerateResult gen =
      generate_video(input ? &*input : nullptr, spec, cb, shape, *predictor,
                     vocab, decode_cfg);
  write_video(args.out_path, gen.video);

  if (!args.trace_dir.empty()) {
    fs::create_directories(args.trace_dir);
    for (std::size_t t = 0; t < gen.trace.steps.size(); ++t) {
      char name[32];
      std::snprintf(name, sizeof(name), "step_%02zu.mgtk", t);
      TokenGrid step_grid{shape, gen.trace.steps[t].estimate};
      write_tokens(fs::path(args.trace_dir) / name, step_grid, cfg.v_vis);
    }
  }
  if (input)
    std::printf("psnr vs input %6.2f dB\n", psnr(gen.video, *input));
  std::printf("wrote %s\n", args.out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"masked video-token generation experiments"};
  app.require_subcommand(1);

  CommonArgs gen_data_args, fit_args, train_args, eval_args, run_args;
  GenerateArgs generate_args;

  add_common(app.add_subcommand("gen-data", "write the synthetic dataset"),
             gen_data_args);
  add_common(app.add_subcommand("fit-tokenizer", "fit the visual codebook"),
             fit_args);
  add_common(app.add_subcommand("train", "train the token predictor"),
             train_args);
  add_common(app.add_subcommand("evaluate", "decode held-out videos and report"),
             eval_args);
  add_common(app.add_subcommand("run", "full pipeline"), run_args);

  CLI::App* generate = app.add_subcommand("generate", "decode one video");
  generate->add_option("--config", generate_args.config_path, "run config file");
  generate->add_option("--artifacts", generate_args.artifacts_dir,
                       "directory with codebook.mgcb / predictor.mgpt");
  generate->add_option("--in", generate_args.in_path, "input video (.mgvd)");
  generate->add_option("--out", generate_args.out_path, "output video (.mgvd)");
  generate->add_option("--task", generate_args.task, "task name (FP, FI, ...)");
  generate->add_option("--steps", generate_args.steps, "decoding steps");
  generate->add_option("--temperature", generate_args.temperature,
                       "gumbel temperature");
  generate->add_option("--schedule", generate_args.schedule,
                       "cosine | uniform | exponential");
  generate->add_option("--seed", generate_args.seed, "decoding seed");
  generate->add_option("--class", generate_args.class_label,
                       "class label for CG/CFP");
  generate->add_option("--trace", generate_args.trace_dir,
                       "directory for per-step token snapshots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("gen-data")) {
      const RunConfig cfg = load_config(gen_data_args);
      fs::create_directories(gen_data_args.out_dir);
      stage_gen_data(cfg, gen_data_args.out_dir);
      std::printf("wrote %d videos\n", cfg.n_train + cfg.n_eval);
    } else if (app.got_subcommand("fit-tokenizer")) {
      const RunConfig cfg = load_config(fit_args);
      const FitReport report = stage_fit_tokenizer(cfg, fit_args.out_dir);
      std::printf("codebook fit in %d iterations, distortion %.6g\n",
                  report.iterations,
                  report.distortion_per_iter.empty()
                      ? 0.0
                      : report.distortion_per_iter.back());
    } else if (app.got_subcommand("train")) {
      const RunConfig cfg = load_config(train_args);
      const auto curve = stage_train(cfg, train_args.out_dir);
      if (!curve.empty())
        std::printf("loss %.4f -> %.4f over %zu steps\n", curve.front().total,
                    curve.back().total, curve.size());
      else
        std::printf("nothing to train for this predictor\n");
    } else if (app.got_subcommand("evaluate")) {
      const RunConfig cfg = load_config(eval_args);
      print_report(stage_evaluate(cfg, eval_args.out_dir));
    } else if (app.got_subcommand("run")) {
      const RunConfig cfg = load_config(run_args);
      print_report(run_experiment(cfg, run_args.out_dir));
    } else if (app.got_subcommand("generate")) {
      return run_generate(generate_args);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
