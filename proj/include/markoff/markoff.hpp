#pragma once

// Umbrella header: μ-Markoff maps on the Farey dual tree, Bowditch-condition
// testing, and numerical verification of the trace identities.

#include "markoff/anosov.hpp"
#include "markoff/appendix.hpp"
#include "markoff/bowditch.hpp"
#include "markoff/farey.hpp"
#include "markoff/identities.hpp"
#include "markoff/markoff_map.hpp"
#include "markoff/matrices.hpp"
#include "markoff/scan.hpp"
#include "markoff/series.hpp"
#include "markoff/slope.hpp"
