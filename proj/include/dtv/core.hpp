#pragma once

// Shared vocabulary types: problems, sampled solutions, the pipeline
// configuration, and the error/result plumbing everything else reports
// failures through. Failures of the domain (unparseable model output, a
// cassette miss, ...) are values, not exceptions; exceptions are reserved
// for broken invariants and I/O.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dtv/rng.hpp"

namespace dtv {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Errors

enum class ErrCode {
  ParseError,
  Unsupported,
  NoAnswerFound,
  NoAnswers,
  PoolTooSmall,
  CassetteMiss,
  BackendError,
  InvalidConfig,
  BadInput,
};

inline const char* err_code_name(ErrCode c) {
  switch (c) {
    case ErrCode::ParseError: return "ParseError";
    case ErrCode::Unsupported: return "Unsupported";
    case ErrCode::NoAnswerFound: return "NoAnswerFound";
    case ErrCode::NoAnswers: return "NoAnswers";
    case ErrCode::PoolTooSmall: return "PoolTooSmall";
    case ErrCode::CassetteMiss: return "CassetteMiss";
    case ErrCode::BackendError: return "BackendError";
    case ErrCode::InvalidConfig: return "InvalidConfig";
    case ErrCode::BadInput: return "BadInput";
  }
  return "?";
}

struct Error {
  ErrCode code;
  std::string message;
  std::size_t position = std::string::npos;  // byte offset where applicable

  std::string render() const {
    std::string s = err_code_name(code);
    s += ": ";
    s += message;
    if (position != std::string::npos) {
      s += " (at byte ";
      s += std::to_string(position);
      s += ")";
    }
    return s;
  }
};

template <typename T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Error e) : v_(std::move(e)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(v_); }
  T& value() & { return std::get<T>(v_); }
  T&& take() && { return std::get<T>(std::move(v_)); }
  const Error& error() const { return std::get<Error>(v_); }

 private:
  std::variant<T, Error> v_;
};

inline Error parse_error(std::string msg, std::size_t pos = std::string::npos) {
  return Error{ErrCode::ParseError, std::move(msg), pos};
}

inline Error unsupported(std::string construct, std::size_t pos = std::string::npos) {
  return Error{ErrCode::Unsupported, std::move(construct), pos};
}

// ---------------------------------------------------------------------------
// Datasets and problems

enum class Dataset { Gsm8k, MathNumTheory, MathAlgebra, MathPrealgebra, MultiArith, Synthetic };

inline const char* dataset_name(Dataset d) {
  switch (d) {
    case Dataset::Gsm8k: return "gsm8k";
    case Dataset::MathNumTheory: return "math-numtheory";
    case Dataset::MathAlgebra: return "math-algebra";
    case Dataset::MathPrealgebra: return "math-prealgebra";
    case Dataset::MultiArith: return "multiarith";
    case Dataset::Synthetic: return "synthetic";
  }
  return "?";
}

inline std::optional<Dataset> dataset_from_name(const std::string& s) {
  for (Dataset d : {Dataset::Gsm8k, Dataset::MathNumTheory, Dataset::MathAlgebra,
                    Dataset::MathPrealgebra, Dataset::MultiArith, Dataset::Synthetic}) {
    if (s == dataset_name(d)) return d;
  }
  return std::nullopt;
}

struct Problem {
  std::string id;
  std::string statement_text;
  std::string ground_truth;  // raw, canonicalized on demand
  Dataset dataset = Dataset::Gsm8k;
};

inline void to_json(Json& j, const Problem& p) {
  j = Json{{"id", p.id},
           {"statement", p.statement_text},
           {"ground_truth", p.ground_truth},
           {"dataset", dataset_name(p.dataset)}};
}

inline void from_json(const Json& j, Problem& p) {
  j.at("id").get_to(p.id);
  j.at("statement").get_to(p.statement_text);
  j.at("ground_truth").get_to(p.ground_truth);
  std::string ds = j.value("dataset", "gsm8k");
  auto parsed = dataset_from_name(ds);
  if (!parsed) throw std::runtime_error("unknown dataset tag: " + ds);
  p.dataset = *parsed;
}

struct SamplingParams {
  double temperature = 0.6;
  double nucleus_p = 0.95;
  int max_tokens = 512;
};

inline void to_json(Json& j, const SamplingParams& s) {
  j = Json{{"temperature", s.temperature}, {"nucleus_p", s.nucleus_p}, {"max_tokens", s.max_tokens}};
}

inline void from_json(const Json& j, SamplingParams& s) {
  j.at("temperature").get_to(s.temperature);
  j.at("nucleus_p").get_to(s.nucleus_p);
  j.at("max_tokens").get_to(s.max_tokens);
}

struct InformalSolution {
  std::string problem_id;
  int sample_index = 0;
  std::string text;
  SamplingParams sampling;
};

inline void to_json(Json& j, const InformalSolution& s) {
  j = Json{{"problem_id", s.problem_id},
           {"sample_index", s.sample_index},
           {"text", s.text},
           {"sampling", s.sampling}};
}

inline void from_json(const Json& j, InformalSolution& s) {
  j.at("problem_id").get_to(s.problem_id);
  j.at("sample_index").get_to(s.sample_index);
  j.at("text").get_to(s.text);
  if (j.contains("sampling")) j.at("sampling").get_to(s.sampling);
}

// ---------------------------------------------------------------------------
// Pipeline configuration

struct PipelineConfig {
  int samples_per_problem = 64;
  int statement_attempts_per_solution = 10;
  int demos_per_statement_prompt = 10;
  int demo_pool_size = 25;
  int demos_per_solution_prompt = 3;
  int solution_demo_pool_size = 10;
  SamplingParams sampling;
  std::int64_t prover_budget = 200000;
  bool vacuous_filter = true;
  bool self_critique = true;
  bool use_sketches = true;  // false = statement-only verification
  std::uint64_t seed = 0;

  void validate() const {
    auto fail = [](const std::string& m) {
      throw std::runtime_error("invalid config: " + m);
    };
    if (samples_per_problem < 1) fail("samples_per_problem must be >= 1");
    if (statement_attempts_per_solution < 1) fail("statement_attempts_per_solution must be >= 1");
    if (demos_per_statement_prompt < 0) fail("demos_per_statement_prompt must be >= 0");
    if (demos_per_statement_prompt > demo_pool_size)
      fail("demos_per_statement_prompt exceeds demo_pool_size");
    if (demos_per_solution_prompt > solution_demo_pool_size)
      fail("demos_per_solution_prompt exceeds solution_demo_pool_size");
    if (prover_budget < 1) fail("prover_budget must be positive");
    if (sampling.temperature < 0) fail("temperature must be >= 0");
    if (sampling.nucleus_p <= 0 || sampling.nucleus_p > 1) fail("nucleus_p must be in (0, 1]");
  }
};

inline void to_json(Json& j, const PipelineConfig& c) {
  j = Json{{"samples_per_problem", c.samples_per_problem},
           {"statement_attempts_per_solution", c.statement_attempts_per_solution},
           {"demos_per_statement_prompt", c.demos_per_statement_prompt},
           {"demo_pool_size", c.demo_pool_size},
           {"demos_per_solution_prompt", c.demos_per_solution_prompt},
           {"solution_demo_pool_size", c.solution_demo_pool_size},
           {"sampling", c.sampling},
           {"prover_budget", c.prover_budget},
           {"vacuous_filter", c.vacuous_filter},
           {"self_critique", c.self_critique},
           {"use_sketches", c.use_sketches},
           {"seed", c.seed}};
}

inline void from_json(const Json& j, PipelineConfig& c) {
  j.at("samples_per_problem").get_to(c.samples_per_problem);
  j.at("statement_attempts_per_solution").get_to(c.statement_attempts_per_solution);
  j.at("demos_per_statement_prompt").get_to(c.demos_per_statement_prompt);
  j.at("demo_pool_size").get_to(c.demo_pool_size);
  j.at("demos_per_solution_prompt").get_to(c.demos_per_solution_prompt);
  j.at("solution_demo_pool_size").get_to(c.solution_demo_pool_size);
  j.at("sampling").get_to(c.sampling);
  j.at("prover_budget").get_to(c.prover_budget);
  j.at("vacuous_filter").get_to(c.vacuous_filter);
  j.at("self_critique").get_to(c.self_critique);
  j.at("use_sketches").get_to(c.use_sketches);
  j.at("seed").get_to(c.seed);
}

// ---------------------------------------------------------------------------
// Flat key = value config files. Lines starting with '#' are comments.
// Unknown keys are rejected so typos do not silently fall back to defaults.

inline void apply_config_entry(PipelineConfig& c, const std::string& key, const std::string& value) {
  auto as_int = [&](auto& field) {
    field = static_cast<std::decay_t<decltype(field)>>(std::stoll(value));
  };
  auto as_bool = [&](bool& field) {
    if (value == "true" || value == "1") field = true;
    else if (value == "false" || value == "0") field = false;
    else throw std::runtime_error("invalid config: boolean expected for " + key);
  };
  if (key == "samples_per_problem") as_int(c.samples_per_problem);
  else if (key == "statement_attempts_per_solution") as_int(c.statement_attempts_per_solution);
  else if (key == "demos_per_statement_prompt") as_int(c.demos_per_statement_prompt);
  else if (key == "demo_pool_size") as_int(c.demo_pool_size);
  else if (key == "demos_per_solution_prompt") as_int(c.demos_per_solution_prompt);
  else if (key == "solution_demo_pool_size") as_int(c.solution_demo_pool_size);
  else if (key == "temperature") c.sampling.temperature = std::stod(value);
  else if (key == "nucleus_p") c.sampling.nucleus_p = std::stod(value);
  else if (key == "max_tokens") as_int(c.sampling.max_tokens);
  else if (key == "prover_budget") as_int(c.prover_budget);
  else if (key == "vacuous_filter") as_bool(c.vacuous_filter);
  else if (key == "self_critique") as_bool(c.self_critique);
  else if (key == "use_sketches") as_bool(c.use_sketches);
  else if (key == "seed") c.seed = std::stoull(value);
  else throw std::runtime_error("invalid config: unknown key '" + key + "'");
}

inline PipelineConfig load_config_text(const std::string& text, PipelineConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("invalid config: line " + std::to_string(lineno) + " has no '='");
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t");
      std::size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    apply_config_entry(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  base.validate();
  return base;
}

inline PipelineConfig load_config_file(const std::string& path, PipelineConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str(), base);
}

// ---------------------------------------------------------------------------
// Stable content digests. Two independent FNV-1a lanes give a 128-bit hex
// string; pure integer arithmetic, so identical on every platform.

class DigestStream {
 public:
  DigestStream& update(std::string_view bytes) {
    std::uint64_t a = a_, b = b_;
    for (unsigned char c : bytes) {
      a = (a ^ c) * 0x100000001b3ULL;
      b = (b ^ c) * 0x100000001b3ULL;
    }
    a_ = a;
    b_ = b;
    return *this;
  }

  std::string hex() const {
    char buf[33];
    static const char* hexd = "0123456789abcdef";
    for (int i = 0; i < 16; ++i) buf[i] = hexd[(a_ >> (60 - 4 * i)) & 0xf];
    for (int i = 0; i < 16; ++i) buf[16 + i] = hexd[(b_ >> (60 - 4 * i)) & 0xf];
    buf[32] = 0;
    return std::string(buf);
  }

 private:
  std::uint64_t a_ = 0xcbf29ce484222325ULL;
  std::uint64_t b_ = 0x84222325cbf29ce4ULL;
};

inline std::string hex_digest(std::string_view bytes) {
  return DigestStream().update(bytes).hex();
}

// Canonical serialization for hashing: nlohmann dumps object keys in sorted
// order and doubles in shortest round-trip form, which is exactly what a
// byte-stable digest needs.
inline std::string config_digest(const PipelineConfig& c) {
  return hex_digest(Json(c).dump());
}

}  // namespace dtv
