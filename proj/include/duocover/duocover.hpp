#pragma once

#include "candidates.hpp"
#include "clustering.hpp"
#include "core.hpp"
#include "feasibility.hpp"
#include "io.hpp"
#include "milp.hpp"
#include "pipeline.hpp"
#include "reductions.hpp"
#include "rng.hpp"
#include "solver.hpp"
