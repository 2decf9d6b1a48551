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

// Clones a coherent state with the symmetric machine, then shows how the
// fidelity responds to the first beam splitter and to detector losses.

#include <cstdio>

#include "linclone/linclone.hpp"

int main() {
    using namespace linclone;

    const GaussianState input = coherent(1.0, 0.5);
    const CloneOutput out = run_cloner(input, ClonerConfig{});
    std::printf("input mean      (%.4f, %.4f)\n", input.mean().x, input.mean().y);
    std::printf("clone 1 mean    (%.4f, %.4f)  var %.4f  F %.6f\n", out.clone1.mean().x, out.clone1.mean().y,
                out.clone1.cov().g11(), static_cast<double>(gaussian_fidelity(input, out.clone1)));
    std::printf("clone 2 mean    (%.4f, %.4f)  var %.4f  F %.6f\n\n", out.clone2.mean().x, out.clone2.mean().y,
                out.clone2.cov().g11(), static_cast<double>(gaussian_fidelity(input, out.clone2)));

    std::printf("tau1    F(eta=1)  F(eta=0.75)  F(eta=0.5)\n");
    for (int k = 1; k <= 9; ++k) {
        const double tau1 = 0.1 * k;
        std::printf("%.1f", tau1);
        for (double eta : {1.0, 0.75, 0.5}) {
            std::printf("  %10.6f", static_cast<double>(clone_fidelity(input, ClonerConfig::symmetric(tau1, eta))));
        }
        std::printf("\n");
    }
    return 0;
}
