#pragma once

#include "rra/analysis.hpp"
#include "rra/bm25.hpp"
#include "rra/error.hpp"
#include "rra/eval.hpp"
#include "rra/index.hpp"
#include "rra/io.hpp"
#include "rra/lexicon.hpp"
#include "rra/query.hpp"
#include "rra/transform.hpp"
