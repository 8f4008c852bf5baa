#include "maskvid/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>

#include "maskvid/decoder.hpp"
#include "maskvid/errors.hpp"
#include "maskvid/io.hpp"
#include "maskvid/kvconfig.hpp"
#include "maskvid/metrics.hpp"

namespace maskvid {

namespace {

namespace fs = std::filesystem;

std::string video_filename(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "video_%04zu.mgvd", index);
  return buf;
}

Codebook load_codebook_for(const RunConfig& cfg, const fs::path& out_dir) {
  Codebook cb = read_codebook(out_dir / "codebook.mgcb");
  if (cb.v_vis != cfg.v_vis ||
      cb.dim != cfg.grid_shape().block_volume() * 1)
    throw ConfigError("stored codebook does not match the configuration");
  return cb;
}

}  // namespace

fs::path data_dir(const fs::path& out_dir) { return out_dir / "data"; }

Dataset load_dataset(const fs::path& out_dir) {
  Dataset ds;
  ds.labels = read_labels(data_dir(out_dir) / "labels.csv");
  ds.videos.reserve(ds.labels.size());
  for (std::size_t i = 0; i < ds.labels.size(); ++i)
    ds.videos.push_back(read_video(data_dir(out_dir) / video_filename(i)));
  return ds;
}

void stage_gen_data(const RunConfig& cfg, const fs::path& out_dir) {
  SyntheticDatasetSpec spec = cfg.data;
  spec.n_videos = cfg.n_train + cfg.n_eval;
  spec.seed = cfg.data_seed();
  const Dataset ds = gen_synthetic(spec);
  fs::create_directories(data_dir(out_dir));
  for (std::size_t i = 0; i < ds.videos.size(); ++i)
    write_video(data_dir(out_dir) / video_filename(i), ds.videos[i]);
  write_labels(data_dir(out_dir) / "labels.csv", ds.labels);
}

FitReport stage_fit_tokenizer(const RunConfig& cfg, const fs::path& out_dir) {
  const Dataset ds = load_dataset(out_dir);
  if (std::cmp_less(ds.videos.size(), cfg.n_train))
    throw ConfigError("dataset holds fewer videos than data.n_train");
  const std::span<const VideoTensor> train(ds.videos.data(),
                                           static_cast<std::size_t>(cfg.n_train));
  FitResult fit = fit_codebook(train, cfg.grid_shape(), cfg.v_vis, cfg.max_iter);
  write_codebook(out_dir / "codebook.mgcb", fit.codebook);
  write_fit_report(out_dir / "fit_report.csv", fit.report);
  return std::move(fit.report);
}

std::vector<LossBreakdown> stage_train(const RunConfig& cfg,
                                       const fs::path& out_dir) {
  std::vector<LossBreakdown> curve;
  if (cfg.predictor_kind == PredictorKind::Oracle) {
    // Nothing to learn; keep the artifact layout uniform.
    write_loss_curve(out_dir / "loss_curve.csv", curve);
    return curve;
  }
  const Dataset ds = load_dataset(out_dir);
  if (std::cmp_less(ds.videos.size(), cfg.n_train))
    throw ConfigError("dataset holds fewer videos than data.n_train");
  const Codebook cb = load_codebook_for(cfg, out_dir);
  const GridShape shape = cfg.grid_shape();

  PottsParams params = PottsParams::zeros(
      cfg.v_vis, static_cast<std::uint32_t>(shape.n_tokens()),
      static_cast<std::uint32_t>(cfg.data.n_classes));
  std::vector<TaskSpec> tasks;
  tasks.reserve(cfg.task_set.size());
  for (TaskKind kind : cfg.task_set) tasks.push_back(cfg.task_for(kind, 0));

  TrainOptions options;
  options.epochs = cfg.epochs;
  options.learning_rate = cfg.learning_rate;
  options.label_smoothing = cfg.label_smoothing;
  options.schedule = cfg.train_schedule;

  Rng rng(cfg.train_seed());
  curve = train_predictor(
      params, {ds.videos.data(), static_cast<std::size_t>(cfg.n_train)},
      {ds.labels.data(), static_cast<std::size_t>(cfg.n_train)}, tasks, cb,
      shape, options, rng);
  write_params(out_dir / "predictor.mgpt", params);
  write_loss_curve(out_dir / "loss_curve.csv", curve);
  return curve;
}

EvalReport stage_evaluate(const RunConfig& cfg, const fs::path& out_dir) {
  const Dataset ds = load_dataset(out_dir);
  const std::size_t need =
      static_cast<std::size_t>(cfg.n_train) + cfg.n_eval;
  if (ds.videos.size() < need)
    throw ConfigError("dataset holds fewer videos than the configured split");
  if (cfg.n_eval == 0) throw ConfigError("evaluation needs data.n_eval > 0");
  const Codebook cb = load_codebook_for(cfg, out_dir);
  const GridShape shape = cfg.grid_shape();
  const VocabularyLayout vocab = cfg.vocab();

  std::unique_ptr<PottsPredictor> potts;
  if (cfg.predictor_kind == PredictorKind::Potts) {
    PottsParams params = read_params(out_dir / "predictor.mgpt");
    if (params.v_vis != cfg.v_vis || params.n_positions != shape.n_tokens() ||
        params.n_classes != static_cast<std::uint32_t>(cfg.data.n_classes))
      throw ConfigError("stored predictor does not match the configuration");
    potts = std::make_unique<PottsPredictor>(std::move(params));
  }

  EvalReport report;
  for (std::size_t task_idx = 0; task_idx < cfg.task_set.size(); ++task_idx) {
    const TaskKind kind = cfg.task_set[task_idx];
    double acc_sum = 0.0, psnr_sum = 0.0;
    for (int e = 0; e < cfg.n_eval; ++e) {
      const std::size_t vi = static_cast<std::size_t>(cfg.n_train) + e;
      const VideoTensor& source = ds.videos[vi];
      const TokenGrid truth = encode(source, cb, shape);

      std::unique_ptr<OraclePredictor> oracle;
      const TokenPredictor* predictor = potts.get();
      if (!predictor) {
        oracle = std::make_unique<OraclePredictor>(truth, cfg.v_vis,
                                                   cfg.oracle_epsilon);
        predictor = oracle.get();
      }

      DecodeConfig decode_cfg = cfg.decode;
      decode_cfg.seed =
          derive_seed(cfg.decode_seed(), task_idx * 1000003ull + e);
      const TaskSpec spec = cfg.task_for(kind, ds.labels[vi]);
      const GenerateResult gen = generate_video(&source, spec, cb, shape,
                                                *predictor, vocab, decode_cfg);
      acc_sum += token_accuracy(gen.tokens, truth);
      psnr_sum += psnr(gen.video, source);
    }
    report.tasks.push_back(TaskEval{kind, acc_sum / cfg.n_eval,
                                    psnr_sum / cfg.n_eval});
  }

  if (fs::exists(out_dir / "loss_curve.csv"))
    report.loss_curve = read_loss_curve(out_dir / "loss_curve.csv");

  KeyValueFile out;
  out.comment(
      "token accuracy, PSNR and loss curves; distribution-level video "
      "metrics need pretrained feature networks and are out of scope");
  std::string tasks;
  for (std::size_t i = 0; i < report.tasks.size(); ++i) {
    if (i) tasks += ",";
    tasks += task_name(report.tasks[i].task);
  }
  out.set("report.tasks", tasks);
  out.set("report.n_eval", static_cast<long long>(cfg.n_eval));
  for (const TaskEval& te : report.tasks) {
    out.set("accuracy." + std::string(task_name(te.task)), te.accuracy);
    out.set("psnr." + std::string(task_name(te.task)), te.psnr_db);
  }
  out.set("loss.steps", static_cast<long long>(report.loss_curve.size()));
  if (!report.loss_curve.empty()) {
    out.set("loss.first", report.loss_curve.front().total);
    out.set("loss.final", report.loss_curve.back().total);
  }
  out.save(out_dir / "report.txt");
  return report;
}

EvalReport run_experiment(const RunConfig& cfg, const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  stage_gen_data(cfg, out_dir);
  stage_fit_tokenizer(cfg, out_dir);
  std::vector<LossBreakdown> curve = stage_train(cfg, out_dir);
  EvalReport report = stage_evaluate(cfg, out_dir);
  report.loss_curve = std::move(curve);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  KeyValueFile timing;
  timing.set("wall_clock_seconds", report.wall_clock_seconds);
  timing.save(out_dir / "timing.txt");
  return report;
}

}  // namespace maskvid
