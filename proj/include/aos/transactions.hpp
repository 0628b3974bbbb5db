#pragma once

#include "aos/transactions/accounts.hpp"
#include "aos/transactions/envelope.hpp"
#include "aos/transactions/json.hpp"
#include "aos/transactions/transaction.hpp"
