#pragma once

#include "aos/txalgebra/dot.hpp"
#include "aos/txalgebra/election.hpp"
#include "aos/txalgebra/expression.hpp"
#include "aos/txalgebra/parser.hpp"
