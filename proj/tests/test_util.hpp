#pragma once

#include <doctest.h>

#include "tbsim/error.hpp"

namespace testutil {

template <class F>
tbsim::ErrorKind kind_of(F&& f)
{
    try {
        f();
    } catch (const tbsim::Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return tbsim::ErrorKind::Config;
}

}  // namespace testutil
