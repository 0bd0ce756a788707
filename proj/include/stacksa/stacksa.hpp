#pragma once

// Everything except the command-line layer.

#include "stacksa/common/error.hpp"
#include "stacksa/common/folds.hpp"
#include "stacksa/common/parallel.hpp"
#include "stacksa/common/rng.hpp"
#include "stacksa/common/types.hpp"
#include "stacksa/common/unicode.hpp"
#include "stacksa/eval/ablation.hpp"
#include "stacksa/eval/evaluate.hpp"
#include "stacksa/eval/metrics.hpp"
#include "stacksa/eval/second_stage.hpp"
#include "stacksa/evodag/classifiers.hpp"
#include "stacksa/evodag/evolve.hpp"
#include "stacksa/evodag/functions.hpp"
#include "stacksa/evodag/model.hpp"
#include "stacksa/evodag/ols.hpp"
#include "stacksa/io/archive.hpp"
#include "stacksa/io/files.hpp"
#include "stacksa/io/jsonl.hpp"
#include "stacksa/io/pipeline.hpp"
#include "stacksa/io/serialize.hpp"
#include "stacksa/linmodel/linear_ovr.hpp"
#include "stacksa/models/embedding.hpp"
#include "stacksa/models/emoji.hpp"
#include "stacksa/models/first_stage.hpp"
#include "stacksa/models/lexicon.hpp"
#include "stacksa/models/text_models.hpp"
#include "stacksa/stacker/stacker.hpp"
#include "stacksa/textproc/config.hpp"
#include "stacksa/textproc/normalize.hpp"
#include "stacksa/textproc/parameter_search.hpp"
#include "stacksa/textproc/sparse.hpp"
#include "stacksa/textproc/tfidf.hpp"
#include "stacksa/textproc/tokenize.hpp"
