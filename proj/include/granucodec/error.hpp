// SPDX-License-Identifier: Apache-2.0
// ----------------------------------------------------------------------------
// Copyright 2026 The granucodec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at:
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.
// ----------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace granucodec {

/// Raised for every recoverable failure: bad input files, malformed or
/// corrupt containers, violated preconditions on public entry points.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A container or codebook whose bytes fail validation.
class FormatError : public Error {
public:
    using Error::Error;
};

#define GRANUCODEC_REQUIRE(cond, ErrType, msg) \
    do {                                       \
        if (!(cond)) throw ErrType(msg);       \
    } while (0)

} // namespace granucodec
