#pragma once

#include <gtest/gtest.h>

#include "aos/core/error.hpp"

#define EXPECT_ERRC(stmt, errc)                                                   \
  do {                                                                            \
    try {                                                                         \
      stmt;                                                                       \
      ADD_FAILURE() << "expected " << aos::to_string(errc) << ", nothing thrown"; \
    } catch (const aos::Error& e_) {                                              \
      EXPECT_EQ(e_.code(), errc) << e_.what();                                    \
    }                                                                             \
  } while (0)
