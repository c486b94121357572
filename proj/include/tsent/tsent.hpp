// tsent - entropy of Markov tree shifts on Cayley trees
//
// Umbrella header.

#ifndef TSENT_TSENT_HPP_
#define TSENT_TSENT_HPP_

#include "cayley_geometry.hpp"
#include "cli.hpp"
#include "config.hpp"
#include "entropy_engine.hpp"
#include "error.hpp"
#include "log_domain.hpp"
#include "matrix.hpp"
#include "mixing_analysis.hpp"
#include "tree_shift.hpp"

#endif  // TSENT_TSENT_HPP_
