#pragma once

// Umbrella header: the full answer-selection library.

#include "dtv/answers.hpp"
#include "dtv/ast.hpp"
#include "dtv/core.hpp"
#include "dtv/eval.hpp"
#include "dtv/ground_eval.hpp"
#include "dtv/http_backend.hpp"
#include "dtv/linear.hpp"
#include "dtv/llm.hpp"
#include "dtv/parser.hpp"
#include "dtv/pipeline.hpp"
#include "dtv/printer.hpp"
#include "dtv/prompts.hpp"
#include "dtv/prover.hpp"
#include "dtv/rational.hpp"
#include "dtv/rng.hpp"
#include "dtv/synthetic.hpp"
