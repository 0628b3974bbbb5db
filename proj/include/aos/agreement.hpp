#pragma once

#include "aos/agreement/message.hpp"
#include "aos/agreement/replica.hpp"
