// cskit — command-line frontend for the code-switching toolkit.
//
// Subcommands: normalize, stats, cluster, train-ner, tag-ner, route-tag,
// train-lid, tag-lid, augment, eval-ner, eval-lid.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error.
// Diagnostics go to stderr; results to stdout or --out. Runs with the same
// inputs, flags and seed are byte-identical, for any --threads value.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cskit/cskit.hpp"
#include "cskit/digest.hpp"
#include "cskit/mt_http.hpp"
#include "cskit/parallel.hpp"

namespace {

using namespace cskit;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct CommonOpts {
  std::string in_path;   // empty: stdin
  std::string out_path;  // empty: stdout
  std::uint64_t seed = 0;
  int threads = default_threads();
};

std::ifstream open_input(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open input file: " + path);
  return f;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open output file: " + path);
  return f;
}

// Every run logs its resolved configuration (seed included) to stderr.
void log_config(const CLI::App* cmd, const CommonOpts& opts) {
  std::cerr << "[cskit] " << cmd->get_name() << " resolved config:";
  for (const CLI::Option* opt : cmd->get_options()) {
    if (opt->get_name().empty() || opt->get_name() == "--help") continue;
    std::cerr << ' ' << opt->get_name() << '=';
    const auto results = opt->results();
    if (results.empty()) {
      std::cerr << opt->get_default_str();
    } else {
      for (std::size_t i = 0; i < results.size(); ++i)
        std::cerr << (i ? "," : "") << results[i];
    }
  }
  std::cerr << " seed=" << opts.seed << " threads=" << opts.threads << '\n';
}

// Training subcommands leave a manifest next to the model file.
void write_manifest(const std::string& model_path,
                    const std::vector<std::string>& inputs,
                    std::uint64_t seed, const std::string& resolved) {
  std::ofstream m(model_path + ".manifest");
  if (!m) return;
  for (const std::string& path : inputs)
    m << "input\t" << path << "\tfnv1a64:" << file_digest(path) << '\n';
  m << "seed\t" << seed << '\n';
  m << "config\t" << resolved << '\n';
}

std::string resolved_string(const CLI::App* cmd) {
  std::string s;
  for (const CLI::Option* opt : cmd->get_options()) {
    if (opt->get_name().empty() || opt->get_name() == "--help") continue;
    if (opt->results().empty()) continue;
    s += opt->get_name();
    s += '=';
    for (const auto& r : opt->results()) s += r + ";";
    s += ' ';
  }
  return s;
}

LidLabelSet label_set_for(const SegLidCorpus& corpus) {
  // canonical order, restricted to labels present in the corpus
  const std::vector<std::string> canon = {"AR",    "EN",    "LANG3", "AMBIG",
                                          "NE.AR", "NE.EN", "NE",    "OTHER"};
  std::set<std::string> present;
  for (const auto& sentence : corpus)
    for (const auto& rec : sentence)
      for (const auto& seg : rec.segments) present.insert(seg.label);
  LidLabelSet out;
  for (const std::string& l : canon)
    if (present.count(l)) out.labels.push_back(l);
  return out;
}

AffixTable load_affixes_or_default(const std::string& path,
                                   const AffixTable& fallback) {
  if (path.empty()) return fallback;
  auto in = open_input(path);
  return AffixTable::load(in);
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

int run_normalize(const CommonOpts& opts, const NormalizationConfig& cfg) {
  std::ifstream fin;
  std::istream* in = &std::cin;
  if (!opts.in_path.empty()) {
    fin = open_input(opts.in_path);
    in = &fin;
  }
  std::ofstream fout;
  std::ostream* out = &std::cout;
  if (!opts.out_path.empty()) {
    fout = open_output(opts.out_path);
    out = &fout;
  }
  std::string line;
  while (std::getline(*in, line)) *out << normalize(line, cfg) << '\n';
  return kExitOk;
}

int run_stats(const CommonOpts& opts) {
  auto in = open_input(opts.in_path);
  const StatsReport r = corpus_stats(read_seglid(in));
  std::ofstream fout;
  std::ostream* out = &std::cout;
  if (!opts.out_path.empty()) {
    fout = open_output(opts.out_path);
    out = &fout;
  }
  *out << "sentences\t" << r.sentences << '\n';
  *out << "tokens\t" << r.tokens << '\n';
  *out << std::fixed << std::setprecision(4);
  *out << "tokens_per_sentence\t" << r.tokens_per_sentence << '\n';
  for (const auto& [tag, count] : r.tag_tokens)
    *out << "tag\t" << tag << '\t' << count << '\t' << r.tag_unique.at(tag)
         << '\n';
  for (const auto& [pattern, count] : r.pattern_tokens)
    *out << "pattern\t" << pattern << '\t' << count << '\n';
  return kExitOk;
}

int run_cluster(const CommonOpts& opts, const std::string& emb_path,
                std::size_t k, std::size_t max_iters, double tol,
                const std::string& resolved) {
  auto in = open_input(emb_path);
  std::vector<std::string> warnings;
  const EmbeddingTable table = EmbeddingTable::load(in, &warnings);
  for (const auto& w : warnings) std::cerr << "[cskit] warning: " << w << '\n';
  KmeansConfig cfg;
  cfg.k = k;
  cfg.seed = opts.seed;
  cfg.max_iters = max_iters;
  cfg.tol = tol;
  cfg.threads = opts.threads;
  warnings.clear();
  const ClusterModel model = kmeans(table, cfg, &warnings);
  for (const auto& w : warnings) std::cerr << "[cskit] warning: " << w << '\n';
  auto out = open_output(opts.out_path);
  model.save(out);
  write_manifest(opts.out_path, {emb_path}, opts.seed, resolved);
  return kExitOk;
}

struct NerFeatureFlags {
  bool stem = false, first = false, last = false, pos = false;
  int window_prev = 1, window_next = 0;
  std::string embeddings;
  std::size_t fine_k = 500, coarse_k = 50;
  std::string affix_file;
};

int run_train_ner(const CommonOpts& opts, const std::string& train_path,
                  double sigma, std::size_t epochs, const NerFeatureFlags& ff,
                  const std::string& resolved) {
  auto in = open_input(train_path);
  const NerCorpus corpus = read_conll(in);

  FeatureTemplateConfig fcfg;
  fcfg.use_current = true;
  fcfg.prev_window = ff.window_prev;
  fcfg.next_window = ff.window_next;
  fcfg.use_stem = ff.stem;
  fcfg.use_first_char = ff.first;
  fcfg.use_last_char = ff.last;
  fcfg.use_pos = ff.pos;
  fcfg.affixes = std::make_shared<AffixTable>(
      load_affixes_or_default(ff.affix_file, default_affixes()));

  // fine/coarse cluster-ID features from an embedding table
  std::optional<ClusterModel> fine, coarse;
  if (!ff.embeddings.empty()) {
    auto ein = open_input(ff.embeddings);
    const EmbeddingTable table = EmbeddingTable::load(ein);
    if (ff.coarse_k > 0) {
      coarse = kmeans(table, {.k = ff.coarse_k,
                              .seed = opts.seed,
                              .threads = opts.threads});
      fcfg.cluster_models.emplace_back("coarse", &*coarse);
    }
    if (ff.fine_k > 0) {
      fine = kmeans(table, {.k = ff.fine_k,
                            .seed = opts.seed + 1,
                            .threads = opts.threads});
      fcfg.cluster_models.emplace_back("fine", &*fine);
    }
  }

  TrainConfig tcfg;
  tcfg.l2_sigma = sigma;
  tcfg.max_epochs = epochs;
  tcfg.seed = opts.seed;
  tcfg.threads = opts.threads;
  const CrfModel model = train_crf(corpus, tcfg, fcfg);
  auto out = open_output(opts.out_path);
  model.save(out);
  // cluster models ride along so tag-ner can rebuild the features
  if (coarse) {
    auto cout_ = open_output(opts.out_path + ".coarse-clusters");
    coarse->save(cout_);
  }
  if (fine) {
    auto fout_ = open_output(opts.out_path + ".fine-clusters");
    fine->save(fout_);
  }
  std::vector<std::string> inputs = {train_path};
  if (!ff.embeddings.empty()) inputs.push_back(ff.embeddings);
  write_manifest(opts.out_path, inputs, opts.seed, resolved);
  return kExitOk;
}

// Loads a trained NER model plus any sidecar cluster files. The affix table
// travels inside the model; --affixes overrides it.
struct LoadedNerModel {
  CrfModel crf;
  std::unique_ptr<ClusterModel> fine, coarse;

  static LoadedNerModel load(const std::string& path,
                             const std::string& affix_file) {
    LoadedNerModel m;
    auto in = open_input(path);
    m.crf = CrfModel::load(in);
    std::ifstream coarse_in(path + ".coarse-clusters");
    if (coarse_in) {
      m.coarse = std::make_unique<ClusterModel>(ClusterModel::load(coarse_in));
      m.crf.templates.cluster_models.emplace_back("coarse", m.coarse.get());
    }
    std::ifstream fine_in(path + ".fine-clusters");
    if (fine_in) {
      m.fine = std::make_unique<ClusterModel>(ClusterModel::load(fine_in));
      m.crf.templates.cluster_models.emplace_back("fine", m.fine.get());
    }
    if (!affix_file.empty()) {
      auto afin = open_input(affix_file);
      m.crf.templates.affixes =
          std::make_shared<AffixTable>(AffixTable::load(afin));
    }
    return m;
  }
};

int run_tag_ner(const CommonOpts& opts, const std::string& model_path,
                const std::string& affix_file) {
  const LoadedNerModel loaded = LoadedNerModel::load(model_path, affix_file);
  auto in = open_input(opts.in_path);
  NerCorpus corpus = read_conll(in);
  std::vector<std::vector<std::string>> tags(corpus.size());
  run_slots(kReduceSlots, opts.threads, [&](std::size_t slot) {
    for (std::size_t i = slot; i < corpus.size(); i += kReduceSlots)
      tags[i] = decode(loaded.crf, corpus[i]);
  });
  std::ofstream fout;
  std::ostream* out = &std::cout;
  if (!opts.out_path.empty()) {
    fout = open_output(opts.out_path);
    out = &fout;
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t t = 0; t < corpus[i].tokens.size(); ++t)
      corpus[i].tokens[t].tag = tags[i][t];
  }
  write_conll(*out, corpus);
  return kExitOk;
}

int run_route_tag(const CommonOpts& opts, const std::string& ar_model,
                  const std::string& en_model,
                  const std::string& default_script) {
  const LoadedNerModel ar = LoadedNerModel::load(ar_model, "");
  const LoadedNerModel en = LoadedNerModel::load(en_model, "");
  std::map<Script, const CrfModel*> taggers = {{Script::Arabic, &ar.crf},
                                               {Script::Latin, &en.crf}};
  RoutingConfig rcfg;
  if (default_script == "ar") rcfg.default_script = Script::Arabic;
  else if (default_script == "en") rcfg.default_script = Script::Latin;

  auto in = open_input(opts.in_path);
  NerCorpus corpus = read_conll(in);
  std::ofstream fout;
  std::ostream* out = &std::cout;
  if (!opts.out_path.empty()) {
    fout = open_output(opts.out_path);
    out = &fout;
  }
  for (LabeledSentence& s : corpus) {
    const auto tags = route_tag(s, taggers, rcfg);
    for (std::size_t t = 0; t < s.tokens.size(); ++t) s.tokens[t].tag = tags[t];
  }
  write_conll(*out, corpus);
  return kExitOk;
}

int run_train_lid(const CommonOpts& opts, const std::string& train_path,
                  double sigma, std::size_t epochs, std::size_t max_seg_len,
                  bool coarse_ne, bool phrase, const std::string& affix_file,
                  const std::string& resolved) {
  auto in = open_input(train_path);
  SegLidCorpus corpus = read_seglid(in);
  if (coarse_ne) corpus = coarse_ne_transform(corpus);
  SegLidTrainConfig cfg;
  cfg.l2_sigma = sigma;
  cfg.max_epochs = epochs;
  cfg.max_seg_len = max_seg_len;
  cfg.seed = opts.seed;
  cfg.threads = opts.threads;
  cfg.phrase_context = phrase;
  cfg.label_set = label_set_for(corpus);
  if (phrase && !cfg.label_set.contains("OTHER"))
    cfg.label_set.labels.push_back("OTHER");
  cfg.affixes = load_affixes_or_default(affix_file, seglid_affix_defaults());
  const SegLidModel model = train_seglid(corpus, cfg);
  auto out = open_output(opts.out_path);
  model.save(out);
  write_manifest(opts.out_path, {train_path}, opts.seed, resolved);
  return kExitOk;
}

int run_tag_lid(const CommonOpts& opts, const std::string& model_path) {
  auto min = open_input(model_path);
  const SegLidModel model = SegLidModel::load(min);
  auto in = open_input(opts.in_path);
  std::ofstream fout;
  std::ostream* out = &std::cout;
  if (!opts.out_path.empty()) {
    fout = open_output(opts.out_path);
    out = &fout;
  }
  // input: whitespace-separated tokens, one sentence per line
  std::vector<std::vector<std::string>> sentences;
  std::string line;
  while (std::getline(in, line)) sentences.push_back(split_columns(line));
  SegLidCorpus tagged(sentences.size());
  run_slots(kReduceSlots, opts.threads, [&](std::size_t slot) {
    for (std::size_t i = slot; i < sentences.size(); i += kReduceSlots) {
      for (const std::string& tok : sentences[i])
        tagged[i].push_back(decode_segmental(model, tok));
    }
  });
  write_seglid(*out, tagged);
  return kExitOk;
}

int run_augment(const CommonOpts& opts, const std::string& method,
                double alpha, int num_aug, std::size_t rank_n,
                const std::string& lexicon_path, const std::string& emb_path,
                const std::string& mt_endpoint, const std::string& mt_dict) {
  auto in = open_input(opts.in_path);
  const NerCorpus corpus = read_conll(in);
  std::ofstream fout;
  std::ostream* out = &std::cout;
  if (!opts.out_path.empty()) {
    fout = open_output(opts.out_path);
    out = &fout;
  }

  EmbeddingTable emb;
  if (!emb_path.empty()) {
    auto ein = open_input(emb_path);
    emb = EmbeddingTable::load(ein);
  }

  NerCorpus augmented;
  if (method == "eda") {
    if (lexicon_path.empty())
      throw ValidationError("augment --method eda requires --lexicon");
    auto lin = open_input(lexicon_path);
    const SynonymLexicon lexicon = SynonymLexicon::load(lin);
    EdaConfig cfg;
    cfg.alpha = alpha;
    cfg.num_aug = num_aug;
    cfg.ops = {EdaOp::SR, EdaOp::RI};  // swap/delete add no new entities
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      cfg.seed = opts.seed + i;
      for (auto& v : eda_augment(corpus[i], cfg, lexicon, emb))
        augmented.push_back(std::move(v));
    }
  } else if (method == "analogy" || method == "full-we") {
    if (emb_path.empty())
      throw ValidationError("augment --method " + method +
                            " requires --embeddings");
    const EntityTypeLists lists = EntityTypeLists::harvest(corpus);
    std::vector<SubstitutionNote> notes;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      augmented.push_back(
          method == "analogy"
              ? analogies_we_sub(corpus[i], lists, emb, opts.seed + i, &notes)
              : full_we_sub(corpus[i], lists, emb, rank_n, opts.seed + i,
                            &notes));
    }
    for (const auto& note : notes)
      std::cerr << "[cskit] warning: token " << note.position << ": "
                << note.message << '\n';
  } else if (method == "bt" || method == "bt2l") {
    std::unique_ptr<MtClient> mt;
    if (!mt_dict.empty()) {
      auto dictin = open_input(mt_dict);
      mt = std::make_unique<DictMtClient>(DictMtClient::load(dictin));
    } else if (!mt_endpoint.empty()) {
      mt = std::make_unique<HttpMtClient>(mt_endpoint);
    } else {
      throw ValidationError("augment --method " + method +
                            " requires --mt-endpoint or --mt-dict");
    }
    BackTranslateConfig cfg;
    if (method == "bt2l") cfg.chain = {"ar", "fr", "de", "ar"};
    const auto dict = tag_dictionary(corpus);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      cfg.seed = opts.seed + i;
      std::vector<std::string> tokens;
      for (const Token& t : corpus[i].tokens) tokens.push_back(t.surface);
      const auto translated = back_translate(tokens, *mt, cfg);
      augmented.push_back(project_tags(translated, dict));
    }
  } else {
    throw CLI::ValidationError(
        "--method", "must be one of eda|analogy|full-we|bt|bt2l");
  }

  write_conll(*out, augmented);

  // increase-factor accounting on stderr
  const auto rows = increase_factor(entity_counts(corpus),
                                    entity_counts(augmented));
  std::cerr << std::fixed << std::setprecision(2);
  for (const auto& [type, row] : rows) {
    std::cerr << "[cskit] " << type << " before=" << row.before
              << " after=" << row.after << " factor=";
    if (row.defined) std::cerr << row.factor;
    else std::cerr << "undefined";
    std::cerr << '\n';
  }
  return kExitOk;
}

int run_eval_ner(const std::string& gold_path, const std::string& pred_path,
                 const std::string& format, const std::string& out_path) {
  auto gin = open_input(gold_path);
  auto pin = open_input(pred_path);
  const NerCorpus gold = read_conll(gin);
  const NerCorpus pred = read_conll(pin);
  if (gold.size() != pred.size())
    throw ValidationError("gold and prediction corpora differ in size");
  std::vector<std::vector<std::string>> pred_tags;
  std::vector<std::string> flat_gold, flat_pred;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    std::vector<std::string> tags;
    for (const Token& t : pred[i].tokens) tags.push_back(t.tag);
    pred_tags.push_back(tags);
    for (const Token& t : gold[i].tokens) flat_gold.push_back(t.tag);
    for (const Token& t : pred[i].tokens) flat_pred.push_back(t.tag);
  }
  const MetricsReport entity = entity_f1_conll(gold, pred_tags);
  const MetricsReport token = token_metrics(flat_gold, flat_pred);

  std::ofstream fout;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    fout = open_output(out_path);
    out = &fout;
  }
  *out << std::fixed << std::setprecision(4);
  if (format == "tsv") {
    *out << "token_accuracy\t" << token.accuracy << '\n';
    *out << "token_f1\t" << token.f1 << '\n';
    *out << "entity_precision\t" << entity.precision << '\n';
    *out << "entity_recall\t" << entity.recall << '\n';
    *out << "entity_f1\t" << entity.f1 << '\n';
    for (const auto& [cls, c] : entity.per_class)
      *out << "entity_f1." << cls << '\t' << c.f1 << '\n';
  } else {
    *out << "metric          value\n";
    *out << "token accuracy  " << token.accuracy << '\n';
    *out << "token f1        " << token.f1 << '\n';
    *out << "entity P        " << entity.precision << '\n';
    *out << "entity R        " << entity.recall << '\n';
    *out << "entity F1       " << entity.f1 << '\n';
    for (const auto& [cls, c] : entity.per_class)
      *out << "  " << std::left << std::setw(14) << cls << std::right << c.f1
           << '\n';
  }
  return kExitOk;
}

int run_eval_lid(const std::string& gold_path, const std::string& pred_path,
                 const std::string& format, const std::string& out_path) {
  auto gin = open_input(gold_path);
  auto pin = open_input(pred_path);
  const auto gold = flatten(read_seglid(gin));
  const auto pred = flatten(read_seglid(pin));
  const SegMetricsReport r = seg_metrics(gold, pred);

  std::ofstream fout;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    fout = open_output(out_path);
    out = &fout;
  }
  *out << std::fixed << std::setprecision(4);
  auto emit = [&](const std::string& name, double v) {
    if (format == "tsv") *out << name << '\t' << v << '\n';
    else *out << std::left << std::setw(16) << name << std::right << v << '\n';
  };
  emit("tag_f1", r.tag_f1);
  emit("accuracy", r.accuracy);
  emit("seg_f1", r.seg_f1);
  emit("char_acc", r.char_acc);
  if (r.mixed_acc) {
    emit("mixed_tag_f1", *r.mixed_tag_f1);
    emit("mixed_seg_f1", *r.mixed_seg_f1);
    emit("mixed_acc", *r.mixed_acc);
    emit("mixed_char_acc", *r.mixed_char_acc);
  } else if (format != "tsv") {
    *out << "mixed_*         absent (no gold multi-segment tokens)\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cskit — Arabic-English code-switching NLP toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value config file (flags win)");

  CommonOpts opts;
  app.add_option("--seed", opts.seed, "run seed")->capture_default_str();
  app.add_option("--threads", opts.threads,
                 "worker threads (1 is the determinism reference)")
      ->capture_default_str();

  // normalize
  auto* normalize_cmd = app.add_subcommand("normalize", "normalize text lines");
  NormalizationConfig ncfg;
  std::string n_in, n_out;
  normalize_cmd->add_option("input", n_in, "input file (default stdin)");
  normalize_cmd->add_option("--out", n_out, "output file (default stdout)");
  normalize_cmd->add_flag("--keep-alef", [&ncfg](std::int64_t) {
    ncfg.unify_alef = false;
  }, "do not unify alef variants");
  normalize_cmd->add_flag("--keep-ya", [&ncfg](std::int64_t) {
    ncfg.unify_ya_alefmaqsura = false;
  }, "do not unify ya / alef maqsura");
  normalize_cmd->add_flag("--keep-diacritics", [&ncfg](std::int64_t) {
    ncfg.strip_diacritics = false;
  }, "keep Arabic diacritics");
  normalize_cmd->add_flag("--keep-tatweel", [&ncfg](std::int64_t) {
    ncfg.strip_tatweel = false;
  }, "keep the tatweel character");
  normalize_cmd->add_flag("--strip-punct", [&ncfg](std::int64_t) {
    ncfg.punctuation_removal = true;
  }, "remove punctuation");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "seglid corpus statistics");
  std::string s_in, s_out;
  stats_cmd->add_option("input", s_in, "seglid corpus")->required();
  stats_cmd->add_option("--out", s_out, "output file (default stdout)");

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "k-means over embeddings");
  std::string c_emb, c_out;
  std::size_t c_k = 50, c_iters = 100;
  double c_tol = 1e-7;
  cluster_cmd->add_option("--embeddings", c_emb, "embedding text file")
      ->required();
  cluster_cmd->add_option("--k", c_k, "cluster count")->capture_default_str();
  cluster_cmd->add_option("--max-iters", c_iters, "Lloyd iteration cap")
      ->capture_default_str();
  cluster_cmd->add_option("--tol", c_tol, "relative objective tolerance")
      ->capture_default_str();
  cluster_cmd->add_option("--out", c_out, "model output path")->required();

  // train-ner
  auto* train_ner_cmd = app.add_subcommand("train-ner", "train the CRF tagger");
  std::string tn_train, tn_out;
  double tn_sigma = 1.0;
  std::size_t tn_epochs = 200;
  NerFeatureFlags ff;
  train_ner_cmd->add_option("--train", tn_train, "CoNLL training corpus")
      ->required();
  train_ner_cmd->add_option("--out", tn_out, "model output path")->required();
  train_ner_cmd->add_option("--sigma", tn_sigma, "L2 sigma")
      ->capture_default_str();
  train_ner_cmd->add_option("--epochs", tn_epochs, "max epochs")
      ->capture_default_str();
  train_ner_cmd->add_option("--window-prev", ff.window_prev,
                            "previous-word window (0..2)")
      ->capture_default_str();
  train_ner_cmd->add_option("--window-next", ff.window_next,
                            "next-word window (0..2)")
      ->capture_default_str();
  train_ner_cmd->add_flag("--stem", ff.stem, "stemming feature");
  train_ner_cmd->add_flag("--lexical", ff.first,
                          "first/last character features");
  train_ner_cmd->add_flag("--pos", ff.pos, "POS column feature");
  train_ner_cmd->add_option("--embeddings", ff.embeddings,
                            "embedding table for cluster-ID features");
  train_ner_cmd->add_option("--fine-k", ff.fine_k, "fine cluster count")
      ->capture_default_str();
  train_ner_cmd->add_option("--coarse-k", ff.coarse_k, "coarse cluster count")
      ->capture_default_str();
  train_ner_cmd->add_option("--affixes", ff.affix_file,
                            "affix table for the stemmer");

  // tag-ner
  auto* tag_ner_cmd = app.add_subcommand("tag-ner", "decode with a CRF model");
  std::string gn_model, gn_in, gn_out, gn_affixes;
  tag_ner_cmd->add_option("--model", gn_model, "trained model")->required();
  tag_ner_cmd->add_option("--in", gn_in, "CoNLL input")->required();
  tag_ner_cmd->add_option("--out", gn_out, "output (default stdout)");
  tag_ner_cmd->add_option("--affixes", gn_affixes, "affix table");

  // route-tag
  auto* route_cmd =
      app.add_subcommand("route-tag", "script-routing baseline tagger");
  std::string r_ar, r_en, r_in, r_out, r_default = "ar";
  route_cmd->add_option("--model-ar", r_ar, "Arabic model")->required();
  route_cmd->add_option("--model-en", r_en, "English model")->required();
  route_cmd->add_option("--default-script", r_default,
                        "script for Mixed/Other tokens (ar|en|none)")
      ->capture_default_str();
  route_cmd->add_option("--in", r_in, "CoNLL input")->required();
  route_cmd->add_option("--out", r_out, "output (default stdout)");

  // train-lid
  auto* train_lid_cmd =
      app.add_subcommand("train-lid", "train the segmental LID model");
  std::string tl_train, tl_out, tl_affixes;
  double tl_sigma = 10.0;
  std::size_t tl_epochs = 150, tl_maxlen = 20;
  bool tl_coarse = false, tl_phrase = false;
  train_lid_cmd->add_option("--train", tl_train, "seglid training corpus")
      ->required();
  train_lid_cmd->add_option("--out", tl_out, "model output path")->required();
  train_lid_cmd->add_option("--sigma", tl_sigma, "L2 sigma")
      ->capture_default_str();
  train_lid_cmd->add_option("--epochs", tl_epochs, "max epochs")
      ->capture_default_str();
  train_lid_cmd->add_option("--max-seg-len", tl_maxlen, "L, max segment length")
      ->capture_default_str();
  train_lid_cmd->add_flag("--coarse-ne", tl_coarse,
                          "collapse NE.AR/NE.EN to NE before training");
  train_lid_cmd->add_flag("--phrase-context", tl_phrase,
                          "also train on sentinel-joined sentences");
  train_lid_cmd->add_option("--affixes", tl_affixes, "affix lexicon file");

  // tag-lid
  auto* tag_lid_cmd =
      app.add_subcommand("tag-lid", "segment and label tokens");
  std::string gl_model, gl_in, gl_out;
  tag_lid_cmd->add_option("--model", gl_model, "trained model")->required();
  tag_lid_cmd->add_option("--in", gl_in, "token lines input")->required();
  tag_lid_cmd->add_option("--out", gl_out, "output (default stdout)");

  // augment
  auto* augment_cmd = app.add_subcommand("augment", "data augmentation");
  std::string a_method, a_in, a_out, a_lexicon, a_emb, a_endpoint, a_dict;
  double a_alpha = 0.4;
  int a_numaug = 4;
  std::size_t a_rank = 5;
  augment_cmd->add_option("--method", a_method, "eda|analogy|full-we|bt|bt2l")
      ->required();
  augment_cmd->add_option("--in", a_in, "CoNLL input corpus")->required();
  augment_cmd->add_option("--out", a_out, "output (default stdout)");
  augment_cmd->add_option("--alpha", a_alpha, "EDA edit fraction")
      ->capture_default_str();
  augment_cmd->add_option("--num-aug", a_numaug, "variants per sentence")
      ->capture_default_str();
  augment_cmd->add_option("--rank-n", a_rank, "neighbor rank for full-we")
      ->capture_default_str();
  augment_cmd->add_option("--lexicon", a_lexicon, "synonym lexicon file");
  augment_cmd->add_option("--embeddings", a_emb, "embedding table");
  augment_cmd->add_option("--mt-endpoint", a_endpoint, "HTTP MT base URL");
  augment_cmd->add_option("--mt-dict", a_dict, "dictionary MT stub file");

  // eval-ner
  auto* eval_ner_cmd = app.add_subcommand("eval-ner", "NER evaluation");
  std::string en_gold, en_pred, en_fmt = "table", en_out;
  eval_ner_cmd->add_option("--gold", en_gold, "gold CoNLL corpus")->required();
  eval_ner_cmd->add_option("--pred", en_pred, "predicted CoNLL corpus")
      ->required();
  eval_ner_cmd->add_option("--format", en_fmt, "table|tsv")
      ->capture_default_str();
  eval_ner_cmd->add_option("--out", en_out, "output (default stdout)");

  // eval-lid
  auto* eval_lid_cmd = app.add_subcommand("eval-lid", "LID evaluation");
  std::string el_gold, el_pred, el_fmt = "table", el_out;
  eval_lid_cmd->add_option("--gold", el_gold, "gold seglid corpus")->required();
  eval_lid_cmd->add_option("--pred", el_pred, "predicted seglid corpus")
      ->required();
  eval_lid_cmd->add_option("--format", el_fmt, "table|tsv")
      ->capture_default_str();
  eval_lid_cmd->add_option("--out", el_out, "output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    log_config(cmd, opts);
    const std::string resolved = resolved_string(cmd);
    if (cmd == normalize_cmd) {
      opts.in_path = n_in;
      opts.out_path = n_out;
      return run_normalize(opts, ncfg);
    }
    if (cmd == stats_cmd) {
      opts.in_path = s_in;
      opts.out_path = s_out;
      return run_stats(opts);
    }
    if (cmd == cluster_cmd) {
      opts.out_path = c_out;
      return run_cluster(opts, c_emb, c_k, c_iters, c_tol, resolved);
    }
    if (cmd == train_ner_cmd) {
      opts.out_path = tn_out;
      return run_train_ner(opts, tn_train, tn_sigma, tn_epochs, ff, resolved);
    }
    if (cmd == tag_ner_cmd) {
      opts.in_path = gn_in;
      opts.out_path = gn_out;
      return run_tag_ner(opts, gn_model, gn_affixes);
    }
    if (cmd == route_cmd) {
      opts.in_path = r_in;
      opts.out_path = r_out;
      return run_route_tag(opts, r_ar, r_en, r_default);
    }
    if (cmd == train_lid_cmd) {
      opts.out_path = tl_out;
      return run_train_lid(opts, tl_train, tl_sigma, tl_epochs, tl_maxlen,
                           tl_coarse, tl_phrase, tl_affixes, resolved);
    }
    if (cmd == tag_lid_cmd) {
      opts.in_path = gl_in;
      opts.out_path = gl_out;
      return run_tag_lid(opts, gl_model);
    }
    if (cmd == augment_cmd) {
      opts.in_path = a_in;
      opts.out_path = a_out;
      return run_augment(opts, a_method, a_alpha, a_numaug, a_rank, a_lexicon,
                         a_emb, a_endpoint, a_dict);
    }
    if (cmd == eval_ner_cmd) return run_eval_ner(en_gold, en_pred, en_fmt, en_out);
    if (cmd == eval_lid_cmd) return run_eval_lid(el_gold, el_pred, el_fmt, el_out);
    std::cerr << "[cskit] unknown subcommand\n";
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "[cskit] usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "[cskit] parse error: " << e.what() << '\n';
    return kExitData;
  } catch (const ValidationError& e) {
    std::cerr << "[cskit] error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "[cskit] error: " << e.what() << '\n';
    return kExitData;
  }
}
