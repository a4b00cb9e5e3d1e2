#pragma once

#include "boltnet/dataset.hpp"
#include "boltnet/errors.hpp"
#include "boltnet/evaluation.hpp"
#include "boltnet/linalg.hpp"
#include "boltnet/model_io.hpp"
#include "boltnet/network.hpp"
#include "boltnet/pipeline.hpp"
#include "boltnet/preprocess.hpp"
#include "boltnet/rng.hpp"
#include "boltnet/synth.hpp"
#include "boltnet/training.hpp"
