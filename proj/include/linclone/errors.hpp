// Copyright 2026 The linclone Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace linclone {

/// Argument outside the documented domain of an operation (negative squeezing,
/// transmissivity outside [0,1], ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A covariance matrix that violates the uncertainty bound or is not positive definite.
struct PhysicalityError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Numerical procedure (quadrature, bracket search, Fock truncation) failed to
/// reach the requested accuracy.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace linclone
