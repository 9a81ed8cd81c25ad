#pragma once

// Convenience umbrella for the whole library.

#include "voxevo/advisor.hpp"
#include "voxevo/advisor_http.hpp"
#include "voxevo/bench.hpp"
#include "voxevo/config.hpp"
#include "voxevo/evolution.hpp"
#include "voxevo/export.hpp"
#include "voxevo/genome.hpp"
#include "voxevo/morphology.hpp"
#include "voxevo/parallel.hpp"
#include "voxevo/physics.hpp"
#include "voxevo/rng.hpp"
#include "voxevo/runner.hpp"
#include "voxevo/serialize.hpp"
