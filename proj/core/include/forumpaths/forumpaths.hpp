#pragma once

#include "forumpaths/cluster.hpp"
#include "forumpaths/deadzone.hpp"
#include "forumpaths/error.hpp"
#include "forumpaths/features.hpp"
#include "forumpaths/ingest.hpp"
#include "forumpaths/models.hpp"
#include "forumpaths/paths.hpp"
#include "forumpaths/rng.hpp"
#include "forumpaths/stats.hpp"
#include "forumpaths/synth.hpp"
#include "forumpaths/timing.hpp"
#include "forumpaths/viz.hpp"
