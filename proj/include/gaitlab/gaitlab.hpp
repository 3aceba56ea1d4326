#pragma once

// Umbrella header for the supported-biped gait evolution lab.

#include "gaitlab/csv.hpp"
#include "gaitlab/evolution.hpp"
#include "gaitlab/experiment.hpp"
#include "gaitlab/gait.hpp"
#include "gaitlab/geometry.hpp"
#include "gaitlab/kinematics.hpp"
#include "gaitlab/rng.hpp"
#include "gaitlab/sim.hpp"
