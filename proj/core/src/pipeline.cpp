#include "pdp/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "pdp/error.hpp"
#include "pdp/hash.hpp"

namespace pdp {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

EmbeddingConfig PipelineConfig::effective_biased() const {
  auto c = biased;
  if (no_affix_bias) {
    c.ngram_min = standard.ngram_min;
    c.ngram_max = standard.ngram_max;
  }
  if (no_window_bias) c.window = standard.window;
  c.seed = derive_seed(seed, "biased");
  c.threads = threads;
  return c;
}

EmbeddingConfig PipelineConfig::effective_standard() const {
  auto c = standard;
  c.seed = derive_seed(seed, "standard");
  c.threads = threads;
  return c;
}

namespace {

std::string omega_name(OmegaMode m) {
  switch (m) {
    case OmegaMode::heuristic:
      return "heuristic";
    case OmegaMode::const1:
      return "const1";
    case OmegaMode::const0:
      return "const0";
  }
  return "heuristic";
}

OmegaMode parse_omega(const std::string& s) {
  if (s == "heuristic") return OmegaMode::heuristic;
  if (s == "const1") return OmegaMode::const1;
  if (s == "const0") return OmegaMode::const0;
  throw FormatError("unknown omega mode '" + s + "' (heuristic, const1, const0)");
}

std::string sources_name(SourceMode m) { return m == SourceMode::random ? "random" : "ranked"; }

SourceMode parse_sources(const std::string& s) {
  if (s == "ranked") return SourceMode::ranked;
  if (s == "random") return SourceMode::random;
  throw FormatError("unknown source mode '" + s + "' (ranked, random)");
}

ordered_json embedding_json(const EmbeddingConfig& c) {
  return {{"ngram_min", c.ngram_min}, {"ngram_max", c.ngram_max}, {"window", c.window},
          {"dim", c.dim},             {"negatives", c.negatives}, {"epochs", c.epochs},
          {"learning_rate", c.learning_rate}, {"bucket_count", c.bucket_count}, {"min_count", c.min_count},
          {"subsample", c.subsample}};
}

void read_embedding(const json& j, EmbeddingConfig& c) {
  c.ngram_min = j.value("ngram_min", c.ngram_min);
  c.ngram_max = j.value("ngram_max", c.ngram_max);
  c.window = j.value("window", c.window);
  c.dim = j.value("dim", c.dim);
  c.negatives = j.value("negatives", c.negatives);
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.bucket_count = j.value("bucket_count", c.bucket_count);
  c.min_count = j.value("min_count", c.min_count);
  c.subsample = j.value("subsample", c.subsample);
}

fs::path resolve(const std::string& p, const fs::path& base) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

ordered_json ingest_section(const PipelineConfig& c) {
  return {{"pos", c.pos},
          {"strip_diacritics", c.normalize.strip_diacritics},
          {"case_fold", c.normalize.case_fold},
          {"lowercase", c.tokenize.lowercase}};
}

ordered_json embed_section(const PipelineConfig& c) {
  auto b = embedding_json(c.effective_biased());
  b["seed"] = c.effective_biased().seed;
  auto s = embedding_json(c.effective_standard());
  s["seed"] = c.effective_standard().seed;
  return {{"biased", b}, {"default", s}, {"threads", c.threads}};
}

ordered_json cells_section(const PipelineConfig& c) {
  return {{"k_max", c.cells.k_max},
          {"restarts", c.cells.restarts},
          {"gold_k", c.cells.gold_k ? json(*c.cells.gold_k) : json(nullptr)},
          {"unit_normalize", c.cells.unit_normalize},
          {"seed", derive_seed(c.seed, "cells")}};
}

ordered_json paradigms_section(const PipelineConfig& c) {
  return {{"omega", omega_name(c.paradigms.omega)},
          {"single_pass", c.paradigms.single_pass},
          {"neighbors", c.paradigms.neighbors}};
}

ordered_json reinflect_section(const PipelineConfig& c) {
  return {{"sources", sources_name(c.sources)}, {"dev_fraction", c.dev_fraction}, {"seed", c.seed}};
}

ordered_json evaluate_section(const PipelineConfig& c) {
  return {{"analogies", c.analogies},
          {"joint_analogy", c.joint_analogy},
          {"analogy_seed", c.analogy_seed.value_or(c.seed)}};
}

}  // namespace

std::string config_to_json(const PipelineConfig& c) {
  ordered_json j;
  j["inputs"] = {{"raw_text", c.raw_text.string()},
                 {"annotations", c.annotations.string()},
                 {"tables", c.tables.string()}};
  j["ingest"] = ingest_section(c);
  j["embeddings"] = {{"biased", embedding_json(c.biased)},
                     {"default", embedding_json(c.standard)},
                     {"no_affix_bias", c.no_affix_bias},
                     {"no_window_bias", c.no_window_bias}};
  auto cells = cells_section(c);
  cells.erase("seed");
  j["cells"] = cells;
  j["paradigms"] = paradigms_section(c);
  j["reinflect"] = {{"sources", sources_name(c.sources)}, {"dev_fraction", c.dev_fraction}};
  j["evaluate"] = {{"analogies", c.analogies},
                   {"joint_analogy", c.joint_analogy},
                   {"analogy_seed", c.analogy_seed ? json(*c.analogy_seed) : json(nullptr)}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["repeats"] = c.repeats;
  j["output"] = c.output.string();
  return j.dump(2) + "\n";
}

PipelineConfig config_from_json(const std::string& text, const fs::path& base_dir) {
  PipelineConfig c;
  try {
    const auto j = json::parse(text);
    if (!j.is_object()) throw FormatError("config must be a JSON object");
    if (const auto in = j.find("inputs"); in != j.end()) {
      c.raw_text = resolve(in->value("raw_text", std::string{}), base_dir);
      c.annotations = resolve(in->value("annotations", std::string{}), base_dir);
      c.tables = resolve(in->value("tables", std::string{}), base_dir);
    }
    if (const auto in = j.find("ingest"); in != j.end()) {
      c.pos = in->value("pos", c.pos);
      c.normalize.strip_diacritics = in->value("strip_diacritics", c.normalize.strip_diacritics);
      c.normalize.case_fold = in->value("case_fold", c.normalize.case_fold);
      c.tokenize.lowercase = in->value("lowercase", c.tokenize.lowercase);
    }
    if (const auto e = j.find("embeddings"); e != j.end()) {
      if (e->contains("biased")) read_embedding(e->at("biased"), c.biased);
      if (e->contains("default")) read_embedding(e->at("default"), c.standard);
      c.no_affix_bias = e->value("no_affix_bias", c.no_affix_bias);
      c.no_window_bias = e->value("no_window_bias", c.no_window_bias);
    }
    if (const auto k = j.find("cells"); k != j.end()) {
      c.cells.k_max = k->value("k_max", c.cells.k_max);
      c.cells.restarts = k->value("restarts", c.cells.restarts);
      c.cells.unit_normalize = k->value("unit_normalize", c.cells.unit_normalize);
      if (k->contains("gold_k") && !k->at("gold_k").is_null()) c.cells.gold_k = k->at("gold_k").get<int>();
    }
    if (const auto p = j.find("paradigms"); p != j.end()) {
      c.paradigms.omega = parse_omega(p->value("omega", omega_name(c.paradigms.omega)));
      c.paradigms.single_pass = p->value("single_pass", c.paradigms.single_pass);
      c.paradigms.neighbors = p->value("neighbors", c.paradigms.neighbors);
    }
    if (const auto r = j.find("reinflect"); r != j.end()) {
      c.sources = parse_sources(r->value("sources", sources_name(c.sources)));
      c.dev_fraction = r->value("dev_fraction", c.dev_fraction);
    }
    if (const auto ev = j.find("evaluate"); ev != j.end()) {
      c.analogies = ev->value("analogies", c.analogies);
      c.joint_analogy = ev->value("joint_analogy", c.joint_analogy);
      if (ev->contains("analogy_seed") && !ev->at("analogy_seed").is_null())
        c.analogy_seed = ev->at("analogy_seed").get<std::uint64_t>();
    }
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.repeats = j.value("repeats", c.repeats);
    if (j.contains("output")) c.output = resolve(j.at("output").get<std::string>(), base_dir);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad config: ") + e.what());
  }
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str(), path.parent_path());
}

const std::vector<Stage>& all_stages() {
  static const std::vector<Stage> stages = {Stage::ingest,    Stage::embed,     Stage::cells,
                                            Stage::paradigms, Stage::reinflect, Stage::evaluate};
  return stages;
}

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::ingest:
      return "ingest";
    case Stage::embed:
      return "embed";
    case Stage::cells:
      return "cells";
    case Stage::paradigms:
      return "paradigms";
    case Stage::reinflect:
      return "reinflect";
    case Stage::evaluate:
      return "evaluate";
  }
  return "?";
}

std::optional<Stage> parse_stage(const std::string& name) {
  for (const auto s : all_stages())
    if (stage_name(s) == name) return s;
  return std::nullopt;
}

namespace {

struct StageSpec {
  std::vector<const char*> inputs;
  std::vector<const char*> outputs;
};

const StageSpec& spec_of(Stage s) {
  static const std::map<Stage, StageSpec> specs = {
      {Stage::ingest, {{}, {artifact::corpus, artifact::lexicon, artifact::gold_grid}}},
      {Stage::embed, {{artifact::corpus}, {artifact::biased_model, artifact::standard_model}}},
      {Stage::cells, {{artifact::biased_model, artifact::lexicon}, {artifact::cells, artifact::dispersion}}},
      {Stage::paradigms,
       {{artifact::cells, artifact::standard_model}, {artifact::first_pass, artifact::paradigms, artifact::exponents}}},
      {Stage::reinflect,
       {{artifact::paradigms, artifact::cells},
        {artifact::predicted_grid, artifact::source_ranking, artifact::rules}}},
      {Stage::evaluate,
       {{artifact::predicted_grid, artifact::gold_grid, artifact::lexicon},
        {artifact::analogies, artifact::metrics_json, artifact::metrics_text}}},
  };
  return specs.at(s);
}

Stage producer_of(const std::string& file) {
  for (const auto s : all_stages())
    for (const auto* out : spec_of(s).outputs)
      if (file == out) return s;
  throw std::logic_error("no stage produces " + file);
}

ordered_json section_of(Stage s, const PipelineConfig& c) {
  switch (s) {
    case Stage::ingest:
      return ingest_section(c);
    case Stage::embed:
      return embed_section(c);
    case Stage::cells:
      return cells_section(c);
    case Stage::paradigms:
      return paradigms_section(c);
    case Stage::reinflect:
      return reinflect_section(c);
    case Stage::evaluate:
      return evaluate_section(c);
  }
  return {};
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

template <class Fn>
void write_artifact(const fs::path& path, Fn&& fn) {
  auto out = open_out(path);
  fn(out);
  out.flush();
  if (!out) throw InputError("failed writing " + path.string());
}

fs::path stamp_path(const fs::path& dir, Stage s) { return dir / ".stage" / (stage_name(s) + ".json"); }

std::optional<json> read_stamp(const fs::path& dir, Stage s) {
  std::ifstream in(stamp_path(dir, s), std::ios::binary);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void run_ingest(const PipelineConfig& c, const fs::path& dir) {
  if (c.annotations.empty() || c.tables.empty())
    throw InputError("ingest needs an annotated corpus (inputs.annotations) and inflection tables (inputs.tables)");
  auto ann_in = open_in(c.annotations);
  auto annotations = parse_annotations(ann_in, c.pos, c.normalize);
  auto tables_in = open_in(c.tables);
  const auto tables = parse_inflection_tables(tables_in, c.normalize);

  Corpus corpus = annotations.corpus;
  if (!c.raw_text.empty()) {
    auto raw_in = open_in(c.raw_text);
    std::stringstream ss;
    ss << raw_in.rdbuf();
    auto raw = tokenize(ss.str(), c.tokenize);
    if (c.normalize.strip_diacritics || c.normalize.case_fold)
      for (auto& s : raw.sentences)
        for (auto& t : s) t = normalize(t, c.normalize);
    corpus.append(raw);
  }
  const auto lexicon = build_lexicon(annotations.tuples, corpus, c.pos);
  if (lexicon.size() == 0) throw PipelineError("ingest: no " + c.pos + " forms found in the annotated corpus");
  const auto gold = build_gold_grid(annotations.tuples, tables);
  spdlog::info("ingest: {} sentences, {} tokens, {} lexicon forms, {} gold paradigms", corpus.sentences.size(),
               corpus.token_count(), lexicon.size(), gold.rows.size());
  write_artifact(dir / artifact::corpus, [&](std::ostream& o) { write_corpus_jsonl(o, corpus); });
  write_artifact(dir / artifact::lexicon, [&](std::ostream& o) { write_lexicon_jsonl(o, lexicon); });
  write_artifact(dir / artifact::gold_grid, [&](std::ostream& o) { write_grid_jsonl(o, gold); });
}

void run_embed(const PipelineConfig& c, const fs::path& dir) {
  auto in = open_in(dir / artifact::corpus);
  const auto corpus = read_corpus_jsonl(in);
  for (const auto& [file, cfg] : {std::pair{artifact::biased_model, c.effective_biased()},
                                  std::pair{artifact::standard_model, c.effective_standard()}}) {
    spdlog::info("embed: training {} (n-grams {}-{}, window {})", file, cfg.ngram_min, cfg.ngram_max, cfg.window);
    const auto model = train_embeddings(corpus, cfg);
    write_artifact(dir / file, [&](std::ostream& o) { model.save(o); });
  }
}

EmbeddingModel load_model(const fs::path& path) {
  auto in = open_in(path);
  return EmbeddingModel::load(in);
}

void run_cells(const PipelineConfig& c, const fs::path& dir) {
  const auto model = load_model(dir / artifact::biased_model);
  auto lex_in = open_in(dir / artifact::lexicon);
  const auto lexicon = read_lexicon_jsonl(lex_in);
  auto cfg = c.cells;
  cfg.seed = derive_seed(c.seed, "cells");
  cfg.threads = c.threads;
  const auto cells = cluster_cells(model, lexicon, cfg);
  spdlog::info("cells: k = {}", cells.k);
  write_artifact(dir / artifact::cells, [&](std::ostream& o) { write_cells_tsv(o, cells); });
  write_artifact(dir / artifact::dispersion, [&](std::ostream& o) { write_curve_csv(o, cells.curve); });
}

CellAssignment load_cells(const fs::path& dir) {
  auto in = open_in(dir / artifact::cells);
  return read_cells_tsv(in);
}

void run_paradigms(const PipelineConfig& c, const fs::path& dir) {
  const auto cells = load_cells(dir).cells();
  const auto model = load_model(dir / artifact::standard_model);
  const EmbeddingCandidateIndex index(model, cells);
  const auto result = cluster_paradigms(cells, &index, c.paradigms);
  spdlog::info("paradigms: {} after the first pass, {} final", result.first_pass.size(), result.paradigms.size());
  write_artifact(dir / artifact::first_pass, [&](std::ostream& o) { write_paradigms_jsonl(o, result.first_pass); });
  write_artifact(dir / artifact::paradigms, [&](std::ostream& o) { write_paradigms_jsonl(o, result.paradigms); });
  write_artifact(dir / artifact::exponents, [&](std::ostream& o) { write_exponents_tsv(o, result.distribution); });
}

void run_reinflect(const PipelineConfig& c, const fs::path& dir) {
  auto in = open_in(dir / artifact::paradigms);
  const auto paradigms = read_paradigms_jsonl(in);
  const int k = load_cells(dir).k;
  PairSplit split;
  try {
    split = make_pairs(paradigms, derive_seed(c.seed, "split"), c.dev_fraction);
  } catch (const PipelineError& e) {
    // Without rules every empty slot copies the paradigm's attested form.
    spdlog::warn("reinflect: {}; filling slots by copying", e.what());
  }
  const auto model = train_rewriter(split.train);
  std::vector<int> cells(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) cells[static_cast<std::size_t>(i)] = i;
  const auto* dev = &split.dev;
  if (dev->empty() && !split.train.empty()) {
    spdlog::warn("reinflect: only one multi-member paradigm; ranking sources on the training pairs");
    dev = &split.train;
  }
  const auto ranking = rank_sources(model, *dev, cells);
  const auto grid = fill_grid(paradigms, k, model, ranking, c.sources, derive_seed(c.seed, "sources"));
  spdlog::info("reinflect: {} training pairs, {} dev pairs, {} x {} grid", split.train.size(), split.dev.size(),
               grid.rows.size(), k);
  write_artifact(dir / artifact::predicted_grid, [&](std::ostream& o) { write_grid_jsonl(o, grid, true); });
  write_artifact(dir / artifact::source_ranking, [&](std::ostream& o) { write_ranking_tsv(o, ranking); });
  write_artifact(dir / artifact::rules, [&](std::ostream& o) { write_rules_tsv(o, model); });
}

MetricsReport run_evaluate(const PipelineConfig& c, const fs::path& dir) {
  auto pred_in = open_in(dir / artifact::predicted_grid);
  const auto predicted = read_grid_jsonl(pred_in);
  auto gold_in = open_in(dir / artifact::gold_grid);
  const auto gold = read_grid_jsonl(gold_in);
  auto lex_in = open_in(dir / artifact::lexicon);
  const auto lexicon = read_lexicon_jsonl(lex_in);
  const auto instances = sample_analogies(gold, lexicon, c.analogies, c.analogy_seed.value_or(c.seed));
  const auto report = evaluate(predicted, gold, lexicon, instances, c.joint_analogy);
  write_artifact(dir / artifact::analogies, [&](std::ostream& o) { write_analogies_tsv(o, instances); });
  write_artifact(dir / artifact::metrics_json, [&](std::ostream& o) { o << report.to_json() << '\n'; });
  write_artifact(dir / artifact::metrics_text, [&](std::ostream& o) { report.write_table(o); });
  return report;
}

void invalidate_after(Stage s, const fs::path& dir) {
  bool later = false;
  for (const auto t : all_stages()) {
    if (later) {
      std::error_code ec;
      fs::remove(stamp_path(dir, t), ec);
      for (const auto* out : spec_of(t).outputs) fs::remove(dir / out, ec);
    }
    if (t == s) later = true;
  }
}

}  // namespace

StageRecord run_stage(Stage stage, const PipelineConfig& config) {
  const auto& dir = config.output;
  fs::create_directories(dir / ".stage");
  const auto& spec = spec_of(stage);

  std::string key_material = stage_name(stage) + '\n' + section_of(stage, config).dump() + '\n';
  if (stage == Stage::ingest) {
    for (const auto& p : {config.raw_text, config.annotations, config.tables}) {
      if (p.empty()) continue;
      if (!fs::exists(p)) throw InputError("missing input file " + p.string());
      key_material += p.filename().string() + ' ' + hex64(hash_file(p)) + '\n';
    }
  }
  for (const auto* in : spec.inputs) {
    const auto path = dir / in;
    if (!fs::exists(path))
      throw InputError("missing artifact " + path.string() + "; run the " + stage_name(producer_of(in)) +
                       " stage first");
    key_material += std::string(in) + ' ' + hex64(hash_file(path)) + '\n';
  }

  StageRecord record;
  record.stage = stage;
  record.key = hex64(fnv1a64(key_material));

  const auto previous = read_stamp(dir, stage);
  if (previous && previous->value("key", std::string{}) == record.key) {
    bool intact = true;
    for (const auto* out : spec.outputs) {
      const auto path = dir / out;
      const auto recorded = previous->at("outputs").value(out, std::string{});
      if (!fs::exists(path) || hex64(hash_file(path)) != recorded) intact = false;
    }
    if (intact) {
      record.cached = true;
      for (const auto* out : spec.outputs) record.outputs.emplace_back(out, previous->at("outputs").at(out));
      spdlog::info("{}: up to date", stage_name(stage));
      return record;
    }
  }

  const auto start = std::chrono::steady_clock::now();
  switch (stage) {
    case Stage::ingest:
      run_ingest(config, dir);
      break;
    case Stage::embed:
      run_embed(config, dir);
      break;
    case Stage::cells:
      run_cells(config, dir);
      break;
    case Stage::paradigms:
      run_paradigms(config, dir);
      break;
    case Stage::reinflect:
      run_reinflect(config, dir);
      break;
    case Stage::evaluate:
      run_evaluate(config, dir);
      break;
  }
  record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ordered_json outputs;
  bool changed = !previous;
  for (const auto* out : spec.outputs) {
    const auto h = hex64(hash_file(dir / out));
    record.outputs.emplace_back(out, h);
    outputs[out] = h;
    if (previous && previous->contains("outputs") && previous->at("outputs").value(out, std::string{}) != h)
      changed = true;
  }
  if (changed) invalidate_after(stage, dir);
  write_artifact(stamp_path(dir, stage),
                 [&](std::ostream& o) { o << ordered_json{{"key", record.key}, {"outputs", outputs}}.dump(2) << '\n'; });
  return record;
}

namespace {

RunResult run_once(const PipelineConfig& config) {
  RunResult result;
  for (const auto s : all_stages()) result.stages.push_back(run_stage(s, config));
  auto in = open_in(config.output / artifact::metrics_json);
  std::stringstream ss;
  ss << in.rdbuf();
  result.report = MetricsReport::from_json(ss.str());

  ordered_json stages = ordered_json::array();
  for (const auto& r : result.stages) {
    ordered_json outputs;
    for (const auto& [file, h] : r.outputs) outputs[file] = h;
    stages.push_back({{"stage", stage_name(r.stage)},
                      {"key", r.key},
                      {"outputs", outputs},
                      {"seconds", r.seconds},
                      {"cached", r.cached}});
  }
  ordered_json manifest;
  manifest["config"] = ordered_json::parse(config_to_json(config));
  manifest["stages"] = stages;
  manifest["metrics"] = ordered_json::parse(result.report.to_json(false));
  write_artifact(config.output / artifact::manifest, [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
  return result;
}

}  // namespace

std::vector<RunResult> run_all(const PipelineConfig& config) {
  if (config.repeats < 1) throw InputError("repeats must be >= 1");
  if (config.repeats == 1) return {run_once(config)};

  std::vector<RunResult> results;
  std::vector<MetricsReport> reports;
  for (int i = 0; i < config.repeats; ++i) {
    auto run = config;
    run.repeats = 1;
    run.seed = config.seed + static_cast<std::uint64_t>(i);
    run.analogy_seed = config.analogy_seed.value_or(config.seed);
    run.output = config.output / ("run_" + std::to_string(i));
    spdlog::info("run {} of {} (seed {})", i + 1, config.repeats, run.seed);
    results.push_back(run_once(run));
    reports.push_back(results.back().report);
  }
  const auto mean = mean_report(reports);
  ordered_json summary;
  summary["runs"] = ordered_json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    auto r = ordered_json::parse(reports[i].to_json(false));
    r["seed"] = config.seed + i;
    summary["runs"].push_back(r);
  }
  summary["mean"] = ordered_json::parse(mean.to_json(false));
  write_artifact(config.output / artifact::metrics_json, [&](std::ostream& o) { o << summary.dump(2) << '\n'; });
  write_artifact(config.output / artifact::metrics_text, [&](std::ostream& o) {
    o << "mean over " << config.repeats << " runs\n";
    mean.write_table(o);
  });
  return results;
}

}  // namespace pdp
