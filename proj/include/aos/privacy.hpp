#pragma once

#include "aos/privacy/blinding.hpp"
#include "aos/privacy/dp.hpp"
#include "aos/privacy/pedersen.hpp"
