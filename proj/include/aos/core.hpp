#pragma once

#include "aos/core/bytes.hpp"
#include "aos/core/crypto.hpp"
#include "aos/core/error.hpp"
#include "aos/core/ids.hpp"
