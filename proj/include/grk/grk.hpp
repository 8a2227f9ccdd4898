#ifndef GRK_GRK_HPP
#define GRK_GRK_HPP

#include "grk/linalg.hpp"
#include "grk/selection.hpp"
#include "grk/solvers.hpp"
#include "grk/analysis.hpp"
#include "grk/harness/random_problem.hpp"
#include "grk/harness/matrix_market.hpp"
#include "grk/harness/experiment.hpp"
#include "grk/harness/results_io.hpp"
#include "grk/harness/config_file.hpp"

#endif  // GRK_GRK_HPP
