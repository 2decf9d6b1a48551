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

#include "linclone/cloner.hpp"
#include "linclone/ensemble.hpp"
#include "linclone/errors.hpp"
#include "linclone/fidelity.hpp"
#include "linclone/fock.hpp"
#include "linclone/phase_space.hpp"
#include "linclone/trajectory.hpp"

namespace linclone {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace linclone
