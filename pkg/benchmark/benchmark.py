# Copyright 2024 The artgallery Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# Imports
import time
from collections import defaultdict

import numpy as np

from artgallery.bench import GenSpec, generate
from artgallery.geometry import visibility_polygon
from artgallery.arrangement import overlay
from artgallery.model import VisibilityMatrix, build_model
from artgallery.lp import solve_lp


# Time the building blocks of one solver iteration on generated polygons of growing size:
# visibility polygons, the overlay of the vertex visibility regions, and the exact and float LP
def run_benchmark(sizes=(20, 40, 80), seeds=(0, 1, 2), cls="spike"):
    timings = defaultdict(list)
    for size in sizes:
        for seed in seeds:
            P = generate(GenSpec(cls, size, seed))
            vertices = P.vertices()

            start = time.monotonic()
            regions = [visibility_polygon(v, P) for v in vertices]
            timings[(size, "visibility")].append(time.monotonic() - start)

            start = time.monotonic()
            overlay([(vp.region, 1) for vp in regions], P)
            timings[(size, "overlay")].append(time.monotonic() - start)

            m = build_model(VisibilityMatrix(P, vertices, vertices))
            for arithmetic in ("exact", "float"):
                start = time.monotonic()
                solve_lp(m, arithmetic=arithmetic)
                timings[(size, f"lp ({arithmetic})")].append(time.monotonic() - start)

    for (size, step), values in sorted(timings.items()):
        print(f"Average of {np.mean(values):.4f} s for {step} on {cls} polygons with {size} vertices")


if __name__ == "__main__":
    run_benchmark()
