#pragma once

// Umbrella header.

#include "hamsplit/core.hpp"
#include "hamsplit/numerics.hpp"
#include "hamsplit/geometry2d.hpp"
#include "hamsplit/measures.hpp"
#include "hamsplit/convex_set.hpp"
#include "hamsplit/lp.hpp"
#include "hamsplit/auxiliary.hpp"
#include "hamsplit/separability.hpp"
#include "hamsplit/miranda.hpp"
#include "hamsplit/solver.hpp"
#include "hamsplit/partitions.hpp"
#include "hamsplit/scenarios.hpp"
#include "hamsplit/io.hpp"
#include "hamsplit/svg.hpp"
