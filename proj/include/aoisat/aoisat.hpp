#pragma once

#include "aoisat/analytics.hpp"
#include "aoisat/availability.hpp"
#include "aoisat/boundary.hpp"
#include "aoisat/config.hpp"
#include "aoisat/coverage.hpp"
#include "aoisat/csv.hpp"
#include "aoisat/error.hpp"
#include "aoisat/experiment.hpp"
#include "aoisat/graph.hpp"
#include "aoisat/node.hpp"
#include "aoisat/policies.hpp"
#include "aoisat/rng.hpp"
#include "aoisat/scenario.hpp"
#include "aoisat/sim.hpp"
#include "aoisat/targets.hpp"
#include "aoisat/trace.hpp"
