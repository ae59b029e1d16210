#pragma once

// Umbrella header: the whole library in dependency order.

#include "ovk/errors.hpp"
#include "ovk/random.hpp"
#include "ovk/series.hpp"
#include "ovk/expr.hpp"
#include "ovk/constants.hpp"
#include "ovk/frame.hpp"
#include "ovk/path.hpp"
#include "ovk/kn.hpp"
#include "ovk/invariant_set.hpp"
#include "ovk/picard.hpp"
#include "ovk/oracles.hpp"
#include "ovk/problem_io.hpp"
#include "ovk/runner.hpp"
