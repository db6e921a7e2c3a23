# Copyright 2026 The QUSUM Lab Authors
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

"""Python bindings for the QUSUM lab."""

from ._core import (
    QusumError,
    block_sweep,
    compression_table,
    cusum_path,
    estimate_delay,
    estimate_tfa,
    induced_distribution,
    kl_divergence,
    measured_relative_entropy,
    optimize_measurement,
    povm_from_json,
    povm_to_json,
    relative_entropy,
    run_cli,
    state,
    state_pair,
    tradeoff,
    verify_dpi,
    verify_lemma3,
)

__all__ = [
    "QusumError",
    "block_sweep",
    "compression_table",
    "cusum_path",
    "estimate_delay",
    "estimate_tfa",
    "induced_distribution",
    "kl_divergence",
    "measured_relative_entropy",
    "optimize_measurement",
    "povm_from_json",
    "povm_to_json",
    "relative_entropy",
    "run_cli",
    "state",
    "state_pair",
    "tradeoff",
    "verify_dpi",
    "verify_lemma3",
]
