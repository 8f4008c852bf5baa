#include "maskvid/run_config.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "maskvid/errors.hpp"

namespace maskvid {

namespace {

const std::set<std::string, std::less<>> kKnownKeys = {
    "seed",
    "data.n_train", "data.n_eval", "data.t", "data.h", "data.w",
    "data.n_classes", "data.rect_h", "data.rect_w", "data.levels",
    "tokenizer.v_vis", "tokenizer.block_t", "tokenizer.block_h",
    "tokenizer.block_w", "tokenizer.max_iter",
    "predictor.kind", "predictor.epsilon", "predictor.lr", "predictor.epochs",
    "predictor.label_smoothing", "predictor.schedule",
    "decode.schedule", "decode.steps", "decode.temperature",
    "tasks",
    "task.kind", "task.t", "task.t1", "task.t2", "task.h_frac", "task.w_frac",
    "task.class_id",
};

int get_int(const KeyValueFile& kv, std::string_view key, int fallback) {
  const std::string* v = kv.find(key);
  if (!v) return fallback;
  const long long parsed = parse_int(*v);
  if (parsed < -(1LL << 31) || parsed > (1LL << 31) - 1)
    throw ConfigError("value for " + std::string(key) + " out of range");
  return static_cast<int>(parsed);
}

double get_double(const KeyValueFile& kv, std::string_view key, double fallback) {
  const std::string* v = kv.find(key);
  return v ? parse_double(*v) : fallback;
}

std::uint64_t get_u64(const KeyValueFile& kv, std::string_view key,
                      std::uint64_t fallback) {
  const std::string* v = kv.find(key);
  return v ? parse_u64(*v) : fallback;
}

}  // namespace

RunConfig RunConfig::from_kv(const KeyValueFile& kv) {
  for (const std::string& key : kv.keys())
    if (!kKnownKeys.contains(key))
      throw ConfigError("unknown config key '" + key + "'");

  RunConfig cfg;
  cfg.seed = get_u64(kv, "seed", cfg.seed);
  cfg.n_train = get_int(kv, "data.n_train", cfg.n_train);
  cfg.n_eval = get_int(kv, "data.n_eval", cfg.n_eval);
  cfg.data.t_frames = get_int(kv, "data.t", cfg.data.t_frames);
  cfg.data.height = get_int(kv, "data.h", cfg.data.height);
  cfg.data.width = get_int(kv, "data.w", cfg.data.width);
  cfg.data.n_classes = get_int(kv, "data.n_classes", cfg.data.n_classes);
  cfg.data.rect_h = get_int(kv, "data.rect_h", cfg.data.rect_h);
  cfg.data.rect_w = get_int(kv, "data.rect_w", cfg.data.rect_w);
  if (const std::string* levels = kv.find("data.levels")) {
    cfg.data.intensity_levels.clear();
    for (const std::string& item : split_list(*levels))
      cfg.data.intensity_levels.push_back(
          static_cast<float>(parse_double(item)));
  }

  const int v_vis = get_int(kv, "tokenizer.v_vis", static_cast<int>(cfg.v_vis));
  if (v_vis < 1) throw ConfigError("tokenizer.v_vis must be positive");
  cfg.v_vis = static_cast<std::uint32_t>(v_vis);
  cfg.block_t = get_int(kv, "tokenizer.block_t", cfg.block_t);
  cfg.block_h = get_int(kv, "tokenizer.block_h", cfg.block_h);
  cfg.block_w = get_int(kv, "tokenizer.block_w", cfg.block_w);
  cfg.max_iter = get_int(kv, "tokenizer.max_iter", cfg.max_iter);

  if (const std::string* kind = kv.find("predictor.kind")) {
    if (*kind == "potts") cfg.predictor_kind = PredictorKind::Potts;
    else if (*kind == "oracle") cfg.predictor_kind = PredictorKind::Oracle;
    else throw ConfigError("predictor.kind must be potts or oracle");
  }
  cfg.oracle_epsilon = get_double(kv, "predictor.epsilon", cfg.oracle_epsilon);
  cfg.learning_rate = get_double(kv, "predictor.lr", cfg.learning_rate);
  cfg.epochs = get_int(kv, "predictor.epochs", cfg.epochs);
  cfg.label_smoothing =
      get_double(kv, "predictor.label_smoothing", cfg.label_smoothing);
  if (const std::string* s = kv.find("predictor.schedule"))
    cfg.train_schedule.kind = schedule_from_name(*s);

  if (const std::string* s = kv.find("decode.schedule"))
    cfg.decode.schedule.kind = schedule_from_name(*s);
  cfg.decode.steps = get_int(kv, "decode.steps", cfg.decode.steps);
  cfg.decode.temperature =
      get_double(kv, "decode.temperature", cfg.decode.temperature);

  if (const std::string* tasks = kv.find("tasks")) {
    cfg.task_set.clear();
    for (const std::string& name : split_list(*tasks))
      cfg.task_set.push_back(task_from_name(name));
    if (cfg.task_set.empty()) throw ConfigError("task set must be non-empty");
  }

  if (const std::string* kind = kv.find("task.kind"))
    cfg.task.kind = task_from_name(*kind);
  cfg.task.t = get_int(kv, "task.t", cfg.task.t);
  cfg.task.t1 = get_int(kv, "task.t1", cfg.task.t1);
  cfg.task.t2 = get_int(kv, "task.t2", cfg.task.t2);
  cfg.task.h_frac = get_double(kv, "task.h_frac", cfg.task.h_frac);
  cfg.task.w_frac = get_double(kv, "task.w_frac", cfg.task.w_frac);
  if (const std::string* cls = kv.find("task.class_id"))
    cfg.task.class_label = static_cast<std::uint32_t>(parse_u64(*cls));

  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  return from_kv(KeyValueFile::load(path));
}

KeyValueFile RunConfig::to_kv() const {
  KeyValueFile kv;
  kv.set("seed", seed);
  kv.set("data.n_train", static_cast<long long>(n_train));
  kv.set("data.n_eval", static_cast<long long>(n_eval));
  kv.set("data.t", static_cast<long long>(data.t_frames));
  kv.set("data.h", static_cast<long long>(data.height));
  kv.set("data.w", static_cast<long long>(data.width));
  kv.set("data.n_classes", static_cast<long long>(data.n_classes));
  kv.set("data.rect_h", static_cast<long long>(data.rect_h));
  kv.set("data.rect_w", static_cast<long long>(data.rect_w));
  std::string levels;
  for (std::size_t i = 0; i < data.intensity_levels.size(); ++i) {
    if (i) levels += ",";
    levels += format_double(data.intensity_levels[i]);
  }
  kv.set("data.levels", levels);
  kv.set("tokenizer.v_vis", static_cast<long long>(v_vis));
  kv.set("tokenizer.block_t", static_cast<long long>(block_t));
  kv.set("tokenizer.block_h", static_cast<long long>(block_h));
  kv.set("tokenizer.block_w", static_cast<long long>(block_w));
  kv.set("tokenizer.max_iter", static_cast<long long>(max_iter));
  kv.set("predictor.kind",
         predictor_kind == PredictorKind::Potts ? "potts" : "oracle");
  kv.set("predictor.epsilon", oracle_epsilon);
  kv.set("predictor.lr", learning_rate);
  kv.set("predictor.epochs", static_cast<long long>(epochs));
  kv.set("predictor.label_smoothing", label_smoothing);
  kv.set("predictor.schedule", schedule_name(train_schedule.kind));
  kv.set("decode.schedule", schedule_name(decode.schedule.kind));
  kv.set("decode.steps", static_cast<long long>(decode.steps));
  kv.set("decode.temperature", decode.temperature);
  std::string tasks;
  for (std::size_t i = 0; i < task_set.size(); ++i) {
    if (i) tasks += ",";
    tasks += task_name(task_set[i]);
  }
  kv.set("tasks", tasks);
  kv.set("task.kind", task_name(task.kind));
  kv.set("task.t", static_cast<long long>(task.t));
  kv.set("task.t1", static_cast<long long>(task.t1));
  kv.set("task.t2", static_cast<long long>(task.t2));
  kv.set("task.h_frac", task.h_frac);
  kv.set("task.w_frac", task.w_frac);
  if (task.class_label)
    kv.set("task.class_id", static_cast<std::uint64_t>(*task.class_label));
  return kv;
}

void RunConfig::validate() const {
  if (n_train < 0 || n_eval < 0)
    throw ConfigError("dataset split sizes must be non-negative");
  if (data.n_classes < 1) throw ConfigError("need at least one class");
  if (max_iter < 1) throw ConfigError("tokenizer.max_iter must be positive");
  if (epochs < 0) throw ConfigError("predictor.epochs must be non-negative");
  if (learning_rate < 0.0) throw ConfigError("predictor.lr must be non-negative");
  if (label_smoothing < 0.0 || label_smoothing >= 1.0)
    throw ConfigError("predictor.label_smoothing must lie in [0, 1)");
  if (oracle_epsilon < 0.0 || oracle_epsilon >= 1.0)
    throw ConfigError("predictor.epsilon must lie in [0, 1)");
  if (decode.steps < 1) throw ConfigError("decode.steps must be positive");
  if (decode.temperature < 0.0)
    throw ConfigError("decode.temperature must be non-negative");
  grid_shape();  // divisibility
  // Class labels must fit the vocabulary layout.
  if (task.class_label && *task.class_label >=
                              static_cast<std::uint32_t>(data.n_classes))
    throw ConfigError("task.class_id outside the class vocabulary");
}

GridShape RunConfig::grid_shape() const {
  try {
    return GridShape::for_video(data.t_frames, data.height, data.width,
                                block_t, block_h, block_w);
  } catch (const DimensionError& e) {
    throw ConfigError(e.what());
  }
}

VocabularyLayout RunConfig::vocab() const {
  return VocabularyLayout{static_cast<std::uint32_t>(data.n_classes), v_vis};
}

TaskSpec RunConfig::task_for(TaskKind kind,
                             std::optional<std::uint32_t> class_label) const {
  TaskSpec spec = task;
  spec.kind = kind;
  spec.class_label = task_uses_class(kind) ? class_label : std::nullopt;
  return spec;
}

}  // namespace maskvid
