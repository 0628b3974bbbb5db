#pragma once

#include "aos/netsim/byzantine.hpp"
#include "aos/netsim/config.hpp"
#include "aos/netsim/simulator.hpp"
