#pragma once

// Umbrella header for the PosteL library: posterior label smoothing for
// transductive node classification, the GCN/MLP trainer, the iterative
// pseudo-labeling pipeline, and the synthetic verification lab.

#include "postel/errors.hpp"
#include "postel/graph.hpp"
#include "postel/io.hpp"
#include "postel/label_state.hpp"
#include "postel/label_stats.hpp"
#include "postel/matrix.hpp"
#include "postel/nn.hpp"
#include "postel/pipeline.hpp"
#include "postel/rng.hpp"
#include "postel/smoothing.hpp"
#include "postel/synthlab.hpp"
