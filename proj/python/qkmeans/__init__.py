# Copyright 2026 The qkmeans Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Quantum-kernel k-means: statevector simulation, feature maps, clustering and metrics."""

from ._qkmeans import (
    FeatureMapConfig,
    Dataset,
    adjusted_mutual_information,
    adjusted_rand_index,
    classical_kmeans,
    encode,
    evaluate,
    fidelity,
    fidelity_exact,
    generate_theta,
    kernel_matrix,
    load_csv,
    make_theta,
    quantum_kmeans,
    run_config,
)

__all__ = [
    "FeatureMapConfig",
    "Dataset",
    "adjusted_mutual_information",
    "adjusted_rand_index",
    "classical_kmeans",
    "encode",
    "evaluate",
    "fidelity",
    "fidelity_exact",
    "generate_theta",
    "kernel_matrix",
    "load_csv",
    "make_theta",
    "quantum_kmeans",
    "run_config",
]
