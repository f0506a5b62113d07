/// @file unigrid.hpp
/// @brief Umbrella header for the whole library.

#pragma once

#include "unigrid/amg.hpp"
#include "unigrid/cycles.hpp"
#include "unigrid/discretization.hpp"
#include "unigrid/experiments.hpp"
#include "unigrid/json_io.hpp"
#include "unigrid/matrix_market.hpp"
#include "unigrid/picard.hpp"
#include "unigrid/positivity.hpp"
#include "unigrid/solver.hpp"
#include "unigrid/sparse.hpp"
#include "unigrid/svg_plot.hpp"
