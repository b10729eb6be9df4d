# Copyright 2026 The Semanifold Authors
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
"""Python bindings for the semanifold belief-state simulator."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import Config, FragmentSpec, IdAllocator, encode_observation

__version__ = "0.1.0"


def config(**overrides):
    """Build a Config from keyword overrides using the scenario-file schema."""
    return Config.from_json(_json.dumps(overrides))


def observe(*texts, clock=0.0, ids=None, **spec_kwargs):
    """Encode plain strings as one observation; shared keyword arguments apply to every spec."""
    ids = ids if ids is not None else IdAllocator()
    return encode_observation([FragmentSpec(t, **spec_kwargs) for t in texts], clock, ids)
