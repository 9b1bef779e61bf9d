#pragma once

#include <doctest.h>

#include <functional>

#include "metastack/error.hpp"

namespace metastack::testing {

inline ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvariantViolation;
}

} // namespace metastack::testing
