#pragma once
// Umbrella include for the whole library.

#include "camo/batch.hpp"
#include "camo/commands.hpp"
#include "camo/core.hpp"
#include "camo/engine.hpp"
#include "camo/errors.hpp"
#include "camo/io.hpp"
#include "camo/metrics.hpp"
#include "camo/oracle.hpp"
#include "camo/stats.hpp"
#include "camo/strategies.hpp"
#include "camo/synth.hpp"
#include "camo/version.hpp"
