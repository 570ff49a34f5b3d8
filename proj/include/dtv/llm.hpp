#pragma once

// Text-generation and scoring backends behind one interface, plus the
// cassette: an append-only JSONL store keyed by a stable digest of the
// canonicalized request. Cassettes make full pipeline runs replayable
// byte-for-byte without network access, and they never see credentials,
// only prompts and completions.

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dtv/core.hpp"

namespace dtv {

struct GenRequest {
  std::string prompt;
  int max_tokens = 512;
  double temperature = 0.6;
  double nucleus_p = 0.95;
  int n = 1;
  std::vector<std::string> stop;
};

struct ScoreRequest {
  std::string prompt;
  std::vector<std::string> continuations;
};

inline void to_json(Json& j, const GenRequest& r) {
  j = Json{{"prompt", r.prompt},     {"max_tokens", r.max_tokens},
           {"temperature", r.temperature}, {"nucleus_p", r.nucleus_p},
           {"n", r.n},               {"stop", r.stop}};
}

inline void from_json(const Json& j, GenRequest& r) {
  j.at("prompt").get_to(r.prompt);
  j.at("max_tokens").get_to(r.max_tokens);
  j.at("temperature").get_to(r.temperature);
  j.at("nucleus_p").get_to(r.nucleus_p);
  j.at("n").get_to(r.n);
  j.at("stop").get_to(r.stop);
}

inline void to_json(Json& j, const ScoreRequest& r) {
  j = Json{{"prompt", r.prompt}, {"continuations", r.continuations}};
}

inline void from_json(const Json& j, ScoreRequest& r) {
  j.at("prompt").get_to(r.prompt);
  j.at("continuations").get_to(r.continuations);
}

// Digests are computed over a canonical serialization: kind tag, then each
// field in declaration order, strings length-prefixed and doubles by IEEE
// bit pattern. Byte-identical across platforms, and no escaping pass over
// multi-kilobyte prompts.
namespace detail {

inline void digest_str(DigestStream& d, std::string_view s) {
  d.update(std::to_string(s.size()));
  d.update(":");
  d.update(s);
  d.update("\n");
}

inline void digest_u64(DigestStream& d, std::uint64_t v) {
  d.update(std::to_string(v));
  d.update("\n");
}

inline void digest_f64(DigestStream& d, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  digest_u64(d, bits);
}

}  // namespace detail

inline std::string gen_digest(const GenRequest& r) {
  DigestStream d;
  d.update("gen\n");
  detail::digest_str(d, r.prompt);
  detail::digest_u64(d, static_cast<std::uint64_t>(r.max_tokens));
  detail::digest_f64(d, r.temperature);
  detail::digest_f64(d, r.nucleus_p);
  detail::digest_u64(d, static_cast<std::uint64_t>(r.n));
  detail::digest_u64(d, r.stop.size());
  for (const auto& s : r.stop) detail::digest_str(d, s);
  return d.hex();
}

inline std::string score_digest(const ScoreRequest& r) {
  DigestStream d;
  d.update("score\n");
  detail::digest_str(d, r.prompt);
  detail::digest_u64(d, r.continuations.size());
  for (const auto& c : r.continuations) detail::digest_str(d, c);
  return d.hex();
}

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual Result<std::vector<std::string>> generate(const GenRequest& req) = 0;
  virtual Result<std::vector<double>> score(const ScoreRequest& req) = 0;
  virtual std::string name() const = 0;
};

// Validating entry points; backends can assume requests passed these.
inline Result<std::vector<std::string>> generate(LlmBackend& backend, const GenRequest& req) {
  if (req.n < 1) return Error{ErrCode::BadInput, "n must be >= 1"};
  if (req.temperature < 0) return Error{ErrCode::BadInput, "temperature must be >= 0"};
  return backend.generate(req);
}

inline Result<std::vector<double>> score(LlmBackend& backend, const ScoreRequest& req) {
  if (req.continuations.size() < 2)
    return Error{ErrCode::BadInput, "score needs at least 2 continuations"};
  return backend.score(req);
}

// ---------------------------------------------------------------------------
// Cassette: JSON Lines, one entry per digest.
// entry = {digest, kind, request, responses, backend, timestamp}

class Cassette {
 public:
  Cassette() : mu_(std::make_unique<std::mutex>()) {}
  explicit Cassette(std::string path) : path_(std::move(path)), mu_(std::make_unique<std::mutex>()) {}

  // Loads an existing file; a missing file is an empty cassette that will be
  // created on first append.
  static Result<Cassette> load(const std::string& path) {
    Cassette c(path);
    std::ifstream in(path);
    if (!in) return c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      Json entry = Json::parse(line, nullptr, false);
      if (entry.is_discarded() || !entry.contains("digest"))
        return Error{ErrCode::BadInput,
                     path + ":" + std::to_string(lineno) + ": malformed cassette entry"};
      std::string digest = entry["digest"].get<std::string>();
      if (!c.entries_.count(digest)) c.order_.push_back(digest);
      c.entries_[digest] = std::move(entry);
    }
    return c;
  }

  bool has(const std::string& digest) const {
    std::lock_guard<std::mutex> lock(*mu_);
    return entries_.count(digest) > 0;
  }

  std::optional<Json> find(const std::string& digest) const {
    std::lock_guard<std::mutex> lock(*mu_);
    auto it = entries_.find(digest);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  // Append-only: a digest already present is left untouched.
  void append(const Json& entry) {
    std::lock_guard<std::mutex> lock(*mu_);
    std::string digest = entry.at("digest").get<std::string>();
    if (entries_.count(digest)) return;
    entries_[digest] = entry;
    order_.push_back(digest);
    if (!path_.empty()) {
      std::ofstream out(path_, std::ios::app);
      out << entry.dump() << "\n";
    }
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(*mu_);
    return entries_.size();
  }

  std::vector<Json> all() const {
    std::lock_guard<std::mutex> lock(*mu_);
    std::vector<Json> out;
    out.reserve(order_.size());
    for (const auto& d : order_) out.push_back(entries_.at(d));
    return out;
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::map<std::string, Json> entries_;
  std::vector<std::string> order_;
  mutable std::unique_ptr<std::mutex> mu_;
};

// Content identity of a cassette: digest of the sorted entry digests, so the
// value is independent of record order and timestamps.
inline std::string cassette_digest(const Cassette& c) {
  std::vector<std::string> keys;
  for (const auto& e : c.all()) keys.push_back(e.at("digest").get<std::string>());
  std::sort(keys.begin(), keys.end());
  DigestStream d;
  d.update("cassette\n");
  for (const auto& k : keys) {
    d.update(k);
    d.update("\n");
  }
  return d.hex();
}

enum class CassetteMode { Record, Replay };

// Wraps an inner backend with the cassette. Record mode calls through on a
// miss and stores the response; replay mode is strict and never calls out.
class CassetteBackend : public LlmBackend {
 public:
  CassetteBackend(Cassette& cassette, CassetteMode mode, LlmBackend* inner = nullptr,
                  std::string timestamp = "1970-01-01T00:00:00Z")
      : cassette_(cassette), mode_(mode), inner_(inner), timestamp_(std::move(timestamp)) {}

  Result<std::vector<std::string>> generate(const GenRequest& req) override {
    std::string digest = gen_digest(req);
    if (auto entry = cassette_.find(digest))
      return entry->at("responses").get<std::vector<std::string>>();
    if (mode_ == CassetteMode::Replay)
      return Error{ErrCode::CassetteMiss, "no recorded response for digest " + digest};
    if (!inner_) return Error{ErrCode::BackendError, "record mode requires a live backend"};
    auto got = inner_->generate(req);
    if (!got.ok()) return got;
    cassette_.append(Json{{"digest", digest},
                          {"kind", "gen"},
                          {"request", req},
                          {"responses", got.value()},
                          {"backend", inner_->name()},
                          {"timestamp", timestamp_}});
    return got;
  }

  Result<std::vector<double>> score(const ScoreRequest& req) override {
    std::string digest = score_digest(req);
    if (auto entry = cassette_.find(digest))
      return entry->at("responses").get<std::vector<double>>();
    if (mode_ == CassetteMode::Replay)
      return Error{ErrCode::CassetteMiss, "no recorded response for digest " + digest};
    if (!inner_) return Error{ErrCode::BackendError, "record mode requires a live backend"};
    auto got = inner_->score(req);
    if (!got.ok()) return got;
    cassette_.append(Json{{"digest", digest},
                          {"kind", "score"},
                          {"request", req},
                          {"responses", got.value()},
                          {"backend", inner_->name()},
                          {"timestamp", timestamp_}});
    return got;
  }

  std::string name() const override {
    return std::string("cassette(") + (mode_ == CassetteMode::Record ? "record" : "replay") + ")";
  }

 private:
  Cassette& cassette_;
  CassetteMode mode_;
  LlmBackend* inner_;
  std::string timestamp_;
};

// A scripted backend for tests and fixture construction: canned responses
// keyed by exact prompt, with optional default score ordering.
class ScriptedBackend : public LlmBackend {
 public:
  void add_generation(const std::string& prompt, std::vector<std::string> completions) {
    generations_[prompt] = std::move(completions);
  }
  void add_score(const std::string& prompt, std::vector<double> scores) {
    scores_[prompt] = std::move(scores);
  }

  Result<std::vector<std::string>> generate(const GenRequest& req) override {
    auto it = generations_.find(req.prompt);
    if (it == generations_.end())
      return Error{ErrCode::BackendError, "scripted backend has no generation for this prompt"};
    auto out = it->second;
    if (static_cast<int>(out.size()) > req.n) out.resize(static_cast<std::size_t>(req.n));
    return out;
  }

  Result<std::vector<double>> score(const ScoreRequest& req) override {
    auto it = scores_.find(req.prompt);
    if (it == scores_.end())
      return Error{ErrCode::BackendError, "scripted backend has no scores for this prompt"};
    if (it->second.size() != req.continuations.size())
      return Error{ErrCode::BackendError, "scripted score arity mismatch"};
    return it->second;
  }

  std::string name() const override { return "scripted"; }

 private:
  std::map<std::string, std::vector<std::string>> generations_;
  std::map<std::string, std::vector<double>> scores_;
};

}  // namespace dtv
