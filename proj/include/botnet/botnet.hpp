#pragma once

#include "botnet/agentsim.hpp"
#include "botnet/config.hpp"
#include "botnet/equilibrium.hpp"
#include "botnet/errors.hpp"
#include "botnet/fixedpoint.hpp"
#include "botnet/hjb.hpp"
#include "botnet/model.hpp"
#include "botnet/numeric.hpp"
#include "botnet/ode.hpp"
