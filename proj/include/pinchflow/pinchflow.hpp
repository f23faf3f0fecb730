#pragma once

#include "pinchflow/errors.hpp"
#include "pinchflow/profiles.hpp"
#include "pinchflow/graph_state.hpp"
#include "pinchflow/geometry.hpp"
#include "pinchflow/solver.hpp"
#include "pinchflow/analysis.hpp"
#include "pinchflow/oracle.hpp"
#include "pinchflow/scenario.hpp"
#include "pinchflow/io.hpp"
#include "pinchflow/pipeline.hpp"
#include "pinchflow/acceptance.hpp"
