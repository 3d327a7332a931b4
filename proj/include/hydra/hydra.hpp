#pragma once

#include "hydra/assembler.hpp"
#include "hydra/data_io.hpp"
#include "hydra/eg_decoder.hpp"
#include "hydra/encoder.hpp"
#include "hydra/eval.hpp"
#include "hydra/executor.hpp"
#include "hydra/features.hpp"
#include "hydra/linear_encoder.hpp"
#include "hydra/ranker.hpp"
#include "hydra/schema.hpp"
#include "hydra/scores.hpp"
#include "hydra/sql.hpp"
#include "hydra/synth.hpp"
#include "hydra/toy_encoder.hpp"
