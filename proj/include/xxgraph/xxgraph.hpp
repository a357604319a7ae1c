#pragma once

#include "xxgraph/analytic.hpp"
#include "xxgraph/chain_model.hpp"
#include "xxgraph/constants.hpp"
#include "xxgraph/core/basis.hpp"
#include "xxgraph/core/propagate.hpp"
#include "xxgraph/dynamics/ensemble.hpp"
#include "xxgraph/dynamics/master.hpp"
#include "xxgraph/dynamics/noise.hpp"
#include "xxgraph/grape.hpp"
#include "xxgraph/graph_targets.hpp"
#include "xxgraph/parallel.hpp"
#include "xxgraph/persistence.hpp"
#include "xxgraph/protocol.hpp"
#include "xxgraph/experiment.hpp"
#include "xxgraph/schedule.hpp"
