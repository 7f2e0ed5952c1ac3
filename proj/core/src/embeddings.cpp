#include "pdp/embeddings.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include <spdlog/spdlog.h>

#include "pdp/error.hpp"
#include "pdp/hash.hpp"
#include "pdp/utf8.hpp"

namespace pdp {

EmbeddingConfig EmbeddingConfig::biased() { return EmbeddingConfig{}; }

EmbeddingConfig EmbeddingConfig::standard() {
  EmbeddingConfig c;
  c.ngram_min = 3;
  c.ngram_max = 6;
  c.window = 5;
  return c;
}

void EmbeddingConfig::validate() const {
  if (ngram_min < 1 || ngram_max < ngram_min) throw std::invalid_argument("need 1 <= ngram_min <= ngram_max");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (negatives < 1) throw std::invalid_argument("negatives must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (bucket_count < 1) throw std::invalid_argument("bucket_count must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (!(learning_rate > 0)) throw std::invalid_argument("learning_rate must be positive");
}

std::vector<std::string> extract_ngrams(std::string_view form, int ngram_min, int ngram_max) {
  std::u32string word = U"<" + utf8::decode(form) + U">";
  const auto len = static_cast<int>(word.size());
  std::vector<std::string> units;
  for (int n = ngram_min; n <= ngram_max && n < len; ++n) {
    for (int pos = 0; pos + n <= len; ++pos) {
      if (n == 1 && (pos == 0 || pos == len - 1)) continue;  // bare boundary marker
      units.push_back(utf8::encode(std::u32string_view(word).substr(static_cast<std::size_t>(pos),
                                                                      static_cast<std::size_t>(n))));
    }
  }
  units.push_back(utf8::encode(word));
  return units;
}

EmbeddingModel::EmbeddingModel(EmbeddingConfig config, std::vector<std::pair<std::string, std::size_t>> vocab)
    : config_(config), words_(std::move(vocab)) {
  config_.validate();
  for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i].first, i);
  const auto dim = static_cast<std::size_t>(config_.dim);
  input_.assign(input_rows() * dim, 0.0f);
  output_.assign(words_.size() * dim, 0.0f);
}

std::optional<std::size_t> EmbeddingModel::word_index(std::string_view form) const {
  const auto it = index_.find(std::string(form));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> EmbeddingModel::unit_rows(std::string_view form) const {
  const auto units = extract_ngrams(form, config_.ngram_min, config_.ngram_max);
  std::vector<std::size_t> rows;
  rows.reserve(units.size());
  const std::size_t nwords = words_.size();
  for (std::size_t i = 0; i + 1 < units.size(); ++i) rows.push_back(nwords + fnv1a32(units[i]) % config_.bucket_count);
  if (auto w = word_index(form))
    rows.push_back(*w);
  else
    rows.push_back(nwords + fnv1a32(units.back()) % config_.bucket_count);
  return rows;
}

std::span<float> EmbeddingModel::input_row(std::size_t row) {
  const auto dim = static_cast<std::size_t>(config_.dim);
  return {input_.data() + row * dim, dim};
}
std::span<const float> EmbeddingModel::input_row(std::size_t row) const {
  const auto dim = static_cast<std::size_t>(config_.dim);
  return {input_.data() + row * dim, dim};
}
std::span<float> EmbeddingModel::output_row(std::size_t word) {
  const auto dim = static_cast<std::size_t>(config_.dim);
  return {output_.data() + word * dim, dim};
}
std::span<const float> EmbeddingModel::output_row(std::size_t word) const {
  const auto dim = static_cast<std::size_t>(config_.dim);
  return {output_.data() + word * dim, dim};
}

std::vector<float> EmbeddingModel::vector(std::string_view form) const {
  std::vector<float> v(static_cast<std::size_t>(config_.dim), 0.0f);
  for (std::size_t row : unit_rows(form)) {
    const auto r = input_row(row);
    for (std::size_t d = 0; d < v.size(); ++d) v[d] += r[d];
  }
  return v;
}

namespace {

constexpr std::size_t kNegativeTableSize = 1'000'000;
constexpr char kMagic[8] = {'P', 'D', 'P', 'E', 'M', 'B', '1', '\0'};

double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

struct Trainer {
  EmbeddingModel& model;
  const std::vector<std::vector<std::size_t>>& sentences;  // word ids
  const std::vector<std::vector<std::size_t>>& units;      // word id -> input rows
  const std::vector<std::uint32_t>& negative_table;
  const std::vector<double>& keep_prob;
  std::uint64_t total_tokens;
  std::atomic<std::uint64_t> processed{0};

  // One epoch over the sentences assigned to `worker`; returns (loss, pairs).
  std::pair<double, std::uint64_t> run(int epoch, int worker, int workers) {
    const auto& cfg = model.config();
    const auto dim = static_cast<std::size_t>(cfg.dim);
    std::mt19937_64 rng(derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)),
                                    static_cast<std::uint64_t>(worker)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> window(1, cfg.window);
    std::uniform_int_distribution<std::size_t> negative(0, negative_table.size() - 1);
    std::vector<float> hidden(dim), grad(dim);
    std::vector<std::size_t> kept;
    double loss = 0;
    std::uint64_t pairs = 0;

    for (std::size_t s = static_cast<std::size_t>(worker); s < sentences.size(); s += static_cast<std::size_t>(workers)) {
      const auto& sent = sentences[s];
      kept.clear();
      for (std::size_t w : sent)
        if (unit(rng) < keep_prob[w]) kept.push_back(w);
      const std::uint64_t done = processed.fetch_add(sent.size(), std::memory_order_relaxed);
      const double progress = static_cast<double>(done) / static_cast<double>(total_tokens);
      const float lr = static_cast<float>(cfg.learning_rate * std::max(0.0, 1.0 - progress));

      for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto& rows = units[kept[i]];
        const int b = window(rng);
        const std::size_t lo = i >= static_cast<std::size_t>(b) ? i - static_cast<std::size_t>(b) : 0;
        const std::size_t hi = std::min(kept.size() - 1, i + static_cast<std::size_t>(b));
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          std::fill(hidden.begin(), hidden.end(), 0.0f);
          for (std::size_t r : rows) {
            const auto in = model.input_row(r);
            for (std::size_t d = 0; d < dim; ++d) hidden[d] += in[d];
          }
          const float inv = 1.0f / static_cast<float>(rows.size());
          for (auto& h : hidden) h *= inv;
          std::fill(grad.begin(), grad.end(), 0.0f);

          auto update = [&](std::size_t target, bool label) {
            auto out = model.output_row(target);
            double dot = 0;
            for (std::size_t d = 0; d < dim; ++d) dot += static_cast<double>(hidden[d]) * out[d];
            const double p = 1.0 / (1.0 + std::exp(-dot));
            loss -= label ? log_sigmoid(dot) : log_sigmoid(-dot);
            const auto alpha = static_cast<float>(lr * ((label ? 1.0 : 0.0) - p));
            for (std::size_t d = 0; d < dim; ++d) {
              grad[d] += alpha * out[d];
              out[d] += alpha * hidden[d];
            }
          };
          const std::size_t target = kept[j];
          update(target, true);
          for (int n = 0; n < cfg.negatives; ++n) {
            std::size_t neg = negative_table[negative(rng)];
            if (neg == target) continue;
            update(neg, false);
          }
          for (std::size_t r : rows) {
            auto in = model.input_row(r);
            for (std::size_t d = 0; d < dim; ++d) in[d] += grad[d];
          }
          ++pairs;
        }
      }
    }
    return {loss, pairs};
  }
};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_arithmetic_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw FormatError("truncated embedding model");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

EmbeddingModel train_embeddings(const Corpus& corpus, const EmbeddingConfig& config) {
  config.validate();
  if (corpus.token_count() == 0) throw PipelineError("cannot train embeddings on an empty corpus");

  std::vector<std::pair<std::string, std::size_t>> vocab;
  for (const auto& [form, count] : corpus.frequencies())
    if (count >= config.min_count) vocab.emplace_back(form, count);
  if (vocab.empty()) throw PipelineError("empty vocabulary after min_count filtering");
  std::stable_sort(vocab.begin(), vocab.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  EmbeddingModel model(config, std::move(vocab));
  const auto& words = model.vocab();
  std::vector<std::vector<std::size_t>> units(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) units[i] = model.unit_rows(words[i].first);

  // Only rows some vocabulary word reaches are initialised; the rest stay
  // zero, which keeps saved models small.
  {
    std::vector<std::size_t> reached;
    for (const auto& u : units) reached.insert(reached.end(), u.begin(), u.end());
    std::sort(reached.begin(), reached.end());
    reached.erase(std::unique(reached.begin(), reached.end()), reached.end());
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<float> init(-1.0f / static_cast<float>(config.dim),
                                               1.0f / static_cast<float>(config.dim));
    for (const auto row : reached)
      for (auto& x : model.input_row(row)) x = init(rng);
  }

  std::vector<std::vector<std::size_t>> sentences;
  std::uint64_t total = 0;
  for (const auto& s : corpus.sentences) {
    std::vector<std::size_t> ids;
    for (const auto& tok : s)
      if (auto w = model.word_index(tok)) ids.push_back(*w);
    total += ids.size();
    if (ids.size() > 1) sentences.push_back(std::move(ids));
  }

  std::vector<double> keep(words.size(), 1.0);
  if (config.subsample > 0) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      const double f = static_cast<double>(words[i].second) / static_cast<double>(total);
      keep[i] = std::min(1.0, std::sqrt(config.subsample / f) + config.subsample / f);
    }
  }

  std::vector<std::uint32_t> table;
  {
    double z = 0;
    for (const auto& [w, c] : words) z += std::pow(static_cast<double>(c), 0.75);
    table.reserve(kNegativeTableSize + words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
      const double share = std::pow(static_cast<double>(words[i].second), 0.75) / z;
      const auto copies = std::max<std::size_t>(1, static_cast<std::size_t>(share * kNegativeTableSize));
      table.insert(table.end(), copies, static_cast<std::uint32_t>(i));
    }
  }

  Trainer trainer{model, sentences, units, table, keep, std::max<std::uint64_t>(1, total * config.epochs)};
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss = 0;
    std::uint64_t pairs = 0;
    if (config.threads == 1) {
      std::tie(loss, pairs) = trainer.run(epoch, 0, 1);
    } else {
      std::vector<std::pair<double, std::uint64_t>> parts(static_cast<std::size_t>(config.threads));
      std::vector<std::thread> pool;
      for (int t = 0; t < config.threads; ++t)
        pool.emplace_back([&, t] { parts[static_cast<std::size_t>(t)] = trainer.run(epoch, t, config.threads); });
      for (auto& th : pool) th.join();
      for (const auto& [l, p] : parts) {
        loss += l;
        pairs += p;
      }
    }
    const double mean = pairs ? loss / static_cast<double>(pairs) : 0.0;
    model.epoch_losses_.push_back(mean);
    spdlog::debug("embeddings: epoch {} loss {:.5f} over {} pairs", epoch + 1, mean, pairs);
  }
  return model;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::string> nearest(const EmbeddingModel& model, std::string_view form,
                                 std::span<const std::string> candidates, std::size_t n) {
  if (n == 0) throw std::invalid_argument("nearest: n must be >= 1");
  const auto query = model.vector(form);
  std::vector<std::pair<double, const std::string*>> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) scored.emplace_back(c == form ? 1.0 : cosine(query, model.vector(c)), &c);
  auto better = [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : *a.second < *b.second; };
  const std::size_t take = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), better);
  std::vector<std::string> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(*scored[i].second);
  return out;
}

void EmbeddingModel::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  put<std::int32_t>(out, config_.ngram_min);
  put<std::int32_t>(out, config_.ngram_max);
  put<std::int32_t>(out, config_.window);
  put<std::int32_t>(out, config_.dim);
  put<std::int32_t>(out, config_.negatives);
  put<std::int32_t>(out, config_.epochs);
  put<double>(out, config_.learning_rate);
  put<std::uint64_t>(out, config_.bucket_count);
  put<std::uint64_t>(out, config_.min_count);
  put<double>(out, config_.subsample);
  put<std::uint64_t>(out, config_.seed);
  put<std::int32_t>(out, config_.threads);
  put<std::uint64_t>(out, words_.size());
  for (const auto& [w, c] : words_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(w.size()));
    out.write(w.data(), static_cast<std::streamsize>(w.size()));
    put<std::uint64_t>(out, c);
  }
  put<std::uint64_t>(out, epoch_losses_.size());
  for (double l : epoch_losses_) put<double>(out, l);
  std::vector<std::uint64_t> nonzero;
  for (std::size_t r = 0; r < input_rows(); ++r) {
    const auto row = input_row(r);
    if (std::any_of(row.begin(), row.end(), [](float x) { return x != 0.0f; })) nonzero.push_back(r);
  }
  put<std::uint64_t>(out, nonzero.size());
  for (const auto r : nonzero) {
    put<std::uint64_t>(out, r);
    for (float x : input_row(r)) put<float>(out, x);
  }
  for (float x : output_) put<float>(out, x);
}

EmbeddingModel EmbeddingModel::load(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw FormatError("not an embedding model file");
  EmbeddingConfig c;
  c.ngram_min = get<std::int32_t>(in);
  c.ngram_max = get<std::int32_t>(in);
  c.window = get<std::int32_t>(in);
  c.dim = get<std::int32_t>(in);
  c.negatives = get<std::int32_t>(in);
  c.epochs = get<std::int32_t>(in);
  c.learning_rate = get<double>(in);
  c.bucket_count = get<std::uint64_t>(in);
  c.min_count = get<std::uint64_t>(in);
  c.subsample = get<double>(in);
  c.seed = get<std::uint64_t>(in);
  c.threads = get<std::int32_t>(in);
  const auto n = get<std::uint64_t>(in);
  std::vector<std::pair<std::string, std::size_t>> vocab;
  vocab.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string w(get<std::uint32_t>(in), '\0');
    if (!in.read(w.data(), static_cast<std::streamsize>(w.size()))) throw FormatError("truncated embedding model");
    const auto count = get<std::uint64_t>(in);
    vocab.emplace_back(std::move(w), count);
  }
  EmbeddingModel model(c, std::move(vocab));
  const auto epochs = get<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < epochs; ++i) model.epoch_losses_.push_back(get<double>(in));
  const auto rows = get<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < rows; ++i) {
    const auto r = get<std::uint64_t>(in);
    if (r >= model.input_rows()) throw FormatError("embedding model row out of range");
    for (auto& x : model.input_row(r)) x = get<float>(in);
  }
  for (auto& x : model.output_) x = get<float>(in);
  return model;
}

void EmbeddingModel::export_text(std::ostream& out) const {
  out << words_.size() << ' ' << config_.dim << '\n';
  for (const auto& [w, c] : words_) {
    out << w;
    for (float x : vector(w)) out << ' ' << x;
    out << '\n';
  }
}

}  // namespace pdp
