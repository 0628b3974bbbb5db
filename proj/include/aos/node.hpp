#pragma once

#include "aos/node/config.hpp"
#include "aos/node/runtime.hpp"
#include "aos/node/transport.hpp"
#include "aos/node/wire.hpp"
