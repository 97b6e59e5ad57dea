#pragma once

// Row-action solvers for consistent dense linear systems: residual-weighted
// randomized Kaczmarz for all 0 < p < infinity plus its uniform and
// maximal-correction limits, convergence-rate analysis, and an experiment
// harness.

#include "kaczmarz/analysis.hpp"
#include "kaczmarz/errors.hpp"
#include "kaczmarz/generators.hpp"
#include "kaczmarz/harness.hpp"
#include "kaczmarz/io.hpp"
#include "kaczmarz/linalg.hpp"
#include "kaczmarz/rng.hpp"
#include "kaczmarz/sampling.hpp"
#include "kaczmarz/solver.hpp"
#include "kaczmarz/system.hpp"
