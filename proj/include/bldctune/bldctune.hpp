#pragma once

#include "bldctune/cascade.hpp"
#include "bldctune/config.hpp"
#include "bldctune/csv.hpp"
#include "bldctune/dft.hpp"
#include "bldctune/export_io.hpp"
#include "bldctune/math_util.hpp"
#include "bldctune/metrics.hpp"
#include "bldctune/motor.hpp"
#include "bldctune/nsga2.hpp"
#include "bldctune/pid.hpp"
#include "bldctune/plot.hpp"
#include "bldctune/power_stage.hpp"
#include "bldctune/rng.hpp"
#include "bldctune/simulation.hpp"
#include "bldctune/trajectory.hpp"
#include "bldctune/transforms.hpp"
#include "bldctune/tuning.hpp"
