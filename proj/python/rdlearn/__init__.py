# Copyright 2026 The rdlearn Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Ratio-divergence RBM learning.

Bit arrays are numpy uint8 with shape (count, Nx) for batches and (Nx,) for
single configurations.
"""

from ._rdlearn import (
    DimensionError,
    Error,
    InvalidArgument,
    IoError,
    ParseError,
    RbmParams,
    TargetModel,
    __version__,
    block_gibbs,
    config_json,
    exact_divergences,
    exact_log_partition,
    exact_model_distribution,
    free_energies,
    free_energy,
    free_energy_grad,
    generate_dataset,
    generate_samples,
    hamming_distances,
    load_dataset,
    load_params,
    objective,
    parse_gset,
    pca_project,
    preset_names,
    r_theta,
    run_experiment,
    save_dataset,
    save_params,
    train,
    wasserstein,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
