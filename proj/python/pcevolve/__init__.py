# Copyright 2026 The PCEvolve Authors
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
"""Private few-shot synthetic data evolution."""

import json as _json

from ._pcevolve import (
    BudgetExceededError,
    BudgetLedger,
    DimensionMismatchError,
    calibrated_utilities,
    contrastive_filter,
    em_probabilities,
    em_sample,
    gm_sigma,
    l2_distance,
    mean_center,
)
from . import _pcevolve

__all__ = [
    "BudgetExceededError",
    "BudgetLedger",
    "DimensionMismatchError",
    "calibrated_utilities",
    "contrastive_filter",
    "default_config",
    "em_probabilities",
    "em_sample",
    "gm_sigma",
    "l2_distance",
    "mean_center",
    "noise_demo",
    "run_experiment",
]


def default_config():
    """Returns the default experiment config as a dict."""
    return _json.loads(_pcevolve.default_config())


def run_experiment(config=None, **overrides):
    """Runs one experiment and returns its report as a dict.

    `config` is a (possibly partial) config dict; missing keys take their
    defaults. Keyword overrides replace top-level keys.
    """
    merged = dict(config or {})
    merged.update(overrides)
    return _json.loads(_pcevolve.run_experiment(_json.dumps(merged)))


def noise_demo(k=10, n=100, epsilon_total=8.0, iterations=20, delta=1e-5,
               seed=0):
    """Compares PE's per-iteration noise scale with the K available votes."""
    return _json.loads(
        _pcevolve.noise_demo(k, n, epsilon_total, iterations, delta, seed))
