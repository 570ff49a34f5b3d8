#pragma once

// A seeded world that stands in for a language model. Generated "solutions"
// carry known-correct or known-wrong answers, and the "formalizations" it
// emits are real statements in the restricted language, engineered so the
// built-in prover verifies them with configured probabilities. The world
// keeps a ground-truth ledger, which makes end-to-end selection experiments
// measurable without any model access.
//
// Statement flavors are tagged through their variable names so the scoring
// side can recognize them again inside a critique prompt:
//   x, y  faithful translation (verifies only when the claimed answer is true)
//   t     unfaithful, assumes the claimed answer outright (trivially provable)
//   z     unfaithful with contradictory assumptions (vacuously provable)
//   u     unfaithful and wrong by one (parses, never proves)
//   w     unfaithful, leans on an unsupported construct (rejected at parse)

#include <cstdint>
#include <string>
#include <vector>

#include "dtv/answers.hpp"
#include "dtv/core.hpp"
#include "dtv/llm.hpp"
#include "dtv/prompts.hpp"
#include "dtv/rng.hpp"

namespace dtv {

struct AnswerNoiseModel {
  double hard_fraction = 0.3;       // share of problems with a strong attractor
  double attractor_weight_easy = 0.35;  // P(wrong answer = attractor | wrong, easy)
  double attractor_weight_hard = 0.85;
  int scatter_range = 50;           // wrong answers land within this of the truth
};

struct SyntheticParams {
  double p_correct_solution = 0.4;
  double p_faithful_formalization = 0.7;
  double p_unfaithful_verified = 0.05;
  double p_correct_verified = 0.8;
  AnswerNoiseModel noise;
};

inline void to_json(Json& j, const AnswerNoiseModel& m) {
  j = Json{{"hard_fraction", m.hard_fraction},
           {"attractor_weight_easy", m.attractor_weight_easy},
           {"attractor_weight_hard", m.attractor_weight_hard},
           {"scatter_range", m.scatter_range}};
}
inline void from_json(const Json& j, AnswerNoiseModel& m) {
  j.at("hard_fraction").get_to(m.hard_fraction);
  j.at("attractor_weight_easy").get_to(m.attractor_weight_easy);
  j.at("attractor_weight_hard").get_to(m.attractor_weight_hard);
  j.at("scatter_range").get_to(m.scatter_range);
}
inline void to_json(Json& j, const SyntheticParams& p) {
  j = Json{{"p_correct_solution", p.p_correct_solution},
           {"p_faithful_formalization", p.p_faithful_formalization},
           {"p_unfaithful_verified", p.p_unfaithful_verified},
           {"p_correct_verified", p.p_correct_verified},
           {"noise", p.noise}};
}
inline void from_json(const Json& j, SyntheticParams& p) {
  j.at("p_correct_solution").get_to(p.p_correct_solution);
  j.at("p_faithful_formalization").get_to(p.p_faithful_formalization);
  j.at("p_unfaithful_verified").get_to(p.p_unfaithful_verified);
  j.at("p_correct_verified").get_to(p.p_correct_verified);
  if (j.contains("noise")) j.at("noise").get_to(p.noise);
}

inline std::optional<Error> validate(const SyntheticParams& p) {
  auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!prob(p.p_correct_solution)) return Error{ErrCode::InvalidConfig, "p_correct_solution outside [0,1]"};
  if (!prob(p.p_faithful_formalization))
    return Error{ErrCode::InvalidConfig, "p_faithful_formalization outside [0,1]"};
  if (!prob(p.p_unfaithful_verified))
    return Error{ErrCode::InvalidConfig, "p_unfaithful_verified outside [0,1]"};
  if (!prob(p.p_correct_verified)) return Error{ErrCode::InvalidConfig, "p_correct_verified outside [0,1]"};
  if (!prob(p.noise.hard_fraction)) return Error{ErrCode::InvalidConfig, "hard_fraction outside [0,1]"};
  if (!prob(p.noise.attractor_weight_easy))
    return Error{ErrCode::InvalidConfig, "attractor_weight_easy outside [0,1]"};
  if (!prob(p.noise.attractor_weight_hard))
    return Error{ErrCode::InvalidConfig, "attractor_weight_hard outside [0,1]"};
  if (p.noise.scatter_range < 1) return Error{ErrCode::InvalidConfig, "scatter_range must be >= 1"};
  return std::nullopt;
}

class SyntheticWorld : public LlmBackend {
 public:
  SyntheticWorld(SyntheticParams params, std::uint64_t seed, std::size_t num_problems)
      : params_(params), seed_(seed) {
    Rng rng = derive_rng(seed, "synthetic-world");
    problems_.reserve(num_problems);
    facts_.reserve(num_problems);
    for (std::size_t k = 0; k < num_problems; ++k) {
      Fact f;
      f.truth = rng.next_int(20, 500);
      // Attractor direction is balanced so the smallest-answer tie break
      // favors neither side in aggregate.
      long long off = rng.next_int(1, params_.noise.scatter_range);
      f.attractor = rng.bernoulli(0.5) && f.truth - off >= 1 ? f.truth - off : f.truth + off;
      f.hard = rng.bernoulli(params_.noise.hard_fraction);
      facts_.push_back(f);
      Problem p;
      p.id = "synth-" + std::to_string(k);
      p.statement_text = "Synthetic exercise synth-" + std::to_string(k) + ". What is the total?";
      p.ground_truth = std::to_string(f.truth);
      p.dataset = Dataset::Synthetic;
      problems_.push_back(std::move(p));
    }
  }

  const std::vector<Problem>& problems() const { return problems_; }
  long long true_answer(std::size_t k) const { return facts_.at(k).truth; }
  long long attractor(std::size_t k) const { return facts_.at(k).attractor; }
  bool is_hard(std::size_t k) const { return facts_.at(k).hard; }

  std::string name() const override { return "synthetic"; }

  Result<std::vector<std::string>> generate(const GenRequest& req) override {
    Rng rng = derive_rng(seed_, "gen:" + gen_digest(req));
    if (ends_with(req.prompt, std::string(kFormalSolutionCue) + "\n"))
      return sketches(req);
    if (ends_with(req.prompt, std::string(kFormalStatementCue) + "\n"))
      return statements(req, rng);
    if (ends_with(req.prompt, std::string(kSolutionCue) + "\n"))
      return solutions(req, rng);
    return Error{ErrCode::BackendError, "synthetic backend: unrecognized prompt shape"};
  }

  Result<std::vector<double>> score(const ScoreRequest& req) override {
    if (!ends_with(req.prompt, kAnswerCue))
      return Error{ErrCode::BackendError, "synthetic backend: unrecognized score prompt"};
    Rng rng = derive_rng(seed_, "score:" + score_digest(req));

    // The statement under critique is the last formal block in the prompt.
    std::size_t at = req.prompt.rfind(std::string(kFormalStatementCue) + "\n");
    std::string block =
        at == std::string::npos ? std::string() : req.prompt.substr(at);
    double p_no = 0.1;  // faithful: mostly endorsed
    if (block.find("fixes t ") != std::string::npos) p_no = 0.75;
    else if (block.find("fixes z ") != std::string::npos) p_no = 0.6;
    else if (block.find("fixes u ") != std::string::npos) p_no = 0.75;
    else if (block.find("fixes w ") != std::string::npos) p_no = 0.75;
    bool no_wins = rng.bernoulli(p_no);

    std::vector<double> out;
    out.reserve(req.continuations.size());
    for (const auto& c : req.continuations) {
      bool is_no = c.rfind("No", 0) == 0;
      bool winner = is_no == no_wins;
      out.push_back(winner ? -1.0 : -2.0);
    }
    return out;
  }

 private:
  struct Fact {
    long long truth = 0;
    long long attractor = 0;
    bool hard = false;
  };

  static bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
  }

  // The target problem is the last synthetic id mentioned in the prompt;
  // demo blocks precede it.
  Result<std::size_t> target_index(const std::string& prompt) const {
    std::size_t at = prompt.rfind("synth-");
    if (at == std::string::npos)
      return Error{ErrCode::BackendError, "synthetic backend: no synthetic problem in prompt"};
    std::size_t pos = at + 6;
    std::size_t end = pos;
    while (end < prompt.size() && std::isdigit(static_cast<unsigned char>(prompt[end]))) ++end;
    if (end == pos)
      return Error{ErrCode::BackendError, "synthetic backend: malformed problem id"};
    std::size_t k = std::stoull(prompt.substr(pos, end - pos));
    if (k >= facts_.size())
      return Error{ErrCode::BackendError, "synthetic backend: problem index out of range"};
    return k;
  }

  long long wrong_answer(const Fact& f, Rng& rng) const {
    double w = f.hard ? params_.noise.attractor_weight_hard : params_.noise.attractor_weight_easy;
    if (rng.bernoulli(w)) return f.attractor;
    long long d = rng.next_int(1, params_.noise.scatter_range);
    bool below = rng.bernoulli(0.5);
    if (below && f.truth - d >= 0) return f.truth - d;
    return f.truth + d;
  }

  Result<std::vector<std::string>> solutions(const GenRequest& req, Rng& rng) const {
    auto idx = target_index(req.prompt);
    if (!idx.ok()) return idx.error();
    const Fact& f = facts_[idx.value()];
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(req.n));
    for (int i = 0; i < req.n; ++i) {
      long long x = rng.bernoulli(params_.p_correct_solution) ? f.truth : wrong_answer(f, rng);
      out.push_back("We work through the steps and arrive at $" + std::to_string(x) +
                    "$. Final Answer: The final answer is $" + std::to_string(x) +
                    "$. I hope it is correct.");
    }
    return out;
  }

  // The claimed answer sits in the target's "Show that it is N." suffix.
  static Result<long long> claimed_answer(const std::string& prompt) {
    static const std::string marker = "Show that it is ";
    std::size_t at = prompt.rfind(marker);
    if (at == std::string::npos)
      return Error{ErrCode::BackendError, "synthetic backend: no claimed answer in prompt"};
    std::size_t pos = at + marker.size();
    std::size_t dot = prompt.find('.', pos);
    if (dot == std::string::npos)
      return Error{ErrCode::BackendError, "synthetic backend: unterminated claimed answer"};
    Answer a = canonicalize(prompt.substr(pos, dot - pos));
    if (a.kind != AnswerKind::Rational || denominator(a.value) != 1)
      return Error{ErrCode::BackendError, "synthetic backend: non-integer claimed answer"};
    return static_cast<long long>(numerator(a.value).convert_to<long long>());
  }

  Result<std::vector<std::string>> statements(const GenRequest& req, Rng& rng) const {
    auto idx = target_index(req.prompt);
    if (!idx.ok()) return idx.error();
    auto claimed = claimed_answer(req.prompt);
    if (!claimed.ok()) return claimed.error();
    const Fact& f = facts_[idx.value()];
    long long x = claimed.value();
    bool correct_claim = x == f.truth;

    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(req.n));
    for (int i = 0; i < req.n; ++i) {
      std::string text;
      if (rng.bernoulli(params_.p_faithful_formalization)) {
        long long a = f.truth / 2;
        long long b = f.truth - a;
        if (correct_claim && !rng.bernoulli(params_.p_correct_verified)) {
          // Faithful but phrased beyond the prover's fragment.
          text = "theorem\n  fixes x y :: nat\n  assumes \"x * y = " + std::to_string(f.truth) +
                 "\"\n    and \"y = 1\"\n  shows \"x = " + std::to_string(x) + "\"";
        } else {
          text = "theorem\n  fixes x :: nat\n  assumes \"x = " + std::to_string(a) + " + " +
                 std::to_string(b) + "\"\n  shows \"x = " + std::to_string(x) + "\"";
        }
      } else if (rng.bernoulli(params_.p_unfaithful_verified)) {
        if (rng.bernoulli(0.5)) {
          text = "theorem\n  fixes t :: nat\n  assumes \"t = " + std::to_string(x) +
                 "\"\n  shows \"t = " + std::to_string(x) + "\"";
        } else {
          text = "theorem\n  fixes z :: nat\n  assumes \"z < " + std::to_string(x) +
                 "\"\n    and \"" + std::to_string(x) + " < z\"\n  shows \"z = " +
                 std::to_string(x) + "\"";
        }
      } else if (rng.bernoulli(0.5)) {
        text = "theorem\n  fixes u :: nat\n  assumes \"u = " + std::to_string(x) +
               " + 1\"\n  shows \"u = " + std::to_string(x) + "\"";
      } else {
        text = "theorem\n  fixes w :: nat\n  assumes \"w dvd " + std::to_string(x) +
               "\"\n  shows \"w = " + std::to_string(x) + "\"";
      }
      out.push_back(std::move(text));
    }
    return out;
  }

  // Sketches are kept neutral: the one-step closing proof adds nothing beyond
  // what the statement already claims, so sketch and statement-only runs
  // verify identically.
  Result<std::vector<std::string>> sketches(const GenRequest& req) const {
    std::vector<std::string> out(static_cast<std::size_t>(req.n),
                                 "proof -\n  show ?thesis using assms by auto  [ATP]\nqed");
    return out;
  }

  SyntheticParams params_;
  std::uint64_t seed_ = 0;
  std::vector<Problem> problems_;
  std::vector<Fact> facts_;
};

}  // namespace dtv
