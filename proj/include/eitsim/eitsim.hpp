#pragma once

#include "eitsim/config.hpp"
#include "eitsim/doppler.hpp"
#include "eitsim/errors.hpp"
#include "eitsim/lambda_system.hpp"
#include "eitsim/lineshape.hpp"
#include "eitsim/propagation.hpp"
#include "eitsim/pulse.hpp"
#include "eitsim/runner.hpp"
#include "eitsim/time_evolution.hpp"
#include "eitsim/units.hpp"
