#pragma once

#include "uwloc/environment.hpp"
#include "uwloc/errors.hpp"
#include "uwloc/fusion.hpp"
#include "uwloc/geodesy.hpp"
#include "uwloc/geometry.hpp"
#include "uwloc/multilateration.hpp"
#include "uwloc/outputs.hpp"
#include "uwloc/propagation.hpp"
#include "uwloc/random.hpp"
#include "uwloc/scenario.hpp"
#include "uwloc/simulation.hpp"
