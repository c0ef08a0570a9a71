# Copyright 2026 The chakit Authors
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

"""Cancer hybrid automata: model checking, costs and therapy synthesis."""

import json

from chakit._core import (
    EXIT_DOMAIN_ERROR,
    EXIT_NEGATIVE,
    EXIT_OK,
    EXIT_UNSUPPORTED,
    EXIT_UNVERIFIED,
    EXIT_USAGE,
    ChakitError,
    pareto_dominates,
    parse_ctl,
    run,
)
from chakit import _core

__all__ = [
    "ChakitError",
    "check",
    "load_model",
    "pareto_dominates",
    "parse_ctl",
    "run",
    "synthesize",
]


def load_model(path):
    """Loads a model file and returns the normalized model as a dict."""
    return json.loads(_core.load_model_json(str(path)))


def _json_command(args):
    code, out, err = run([str(a) for a in args] + ["--json"])
    if code in (EXIT_DOMAIN_ERROR, EXIT_USAGE, EXIT_UNSUPPORTED):
        raise ChakitError(err.strip())
    return code, json.loads(out)


def check(path, formula, therapy=None):
    """Model-checks `formula` under a memoryless therapy (None: no drugs)."""
    args = ["check", path, formula]
    if therapy:
        args += ["--therapy", therapy]
    return _json_command(args)[1]


def synthesize(path, goal, menu=(), strategy_out=None):
    """Synthesizes a strategy for `goal`; returns the result report."""
    args = ["synthesize", path, "--goal", goal]
    for c in menu:
        args += ["--menu", c]
    if strategy_out:
        args += ["--strategy-out", strategy_out]
    return _json_command(args)[1]
