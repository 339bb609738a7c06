// This file is part of gff.
//
// Licensed under the Apache License, Version 2.0 (see
// LICENSE or https://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <stdexcept>
#include <string>

namespace gff {

/// Base class for all gff errors.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A mathematical precondition was violated by the caller.
class domain_error : public error {
public:
    using error::error;
};

/// An input exceeds one of the documented desk-scale caps.
class size_error : public error {
public:
    using error::error;
};

/// Input data is structurally invalid (singular model, infinite cokernel, ...).
class structure_error : public error {
public:
    using error::error;
};

/// An element list or operation table fails to describe a group.
class input_error : public error {
public:
    using error::error;
};

/// A self-diagnostic failed. This indicates a bug, not bad input.
class internal_error : public error {
public:
    using error::error;
};

} // namespace gff
