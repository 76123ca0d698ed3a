#pragma once

#include "beq/errors.hpp"
#include "samplers.hpp"

#include <doctest.h>

#include <functional>

namespace beq::testing {

// Code of the beq::Error thrown by fn; records a failure if nothing is thrown.
inline ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL_CHECK("expected a beq::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace beq::testing
