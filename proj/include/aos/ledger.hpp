#pragma once

#include "aos/ledger/block.hpp"
#include "aos/ledger/chain.hpp"
#include "aos/ledger/store.hpp"
