# Copyright 2026 The CADP Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Conditional flow privatization.

The heavy lifting lives in the C++ extension ``cadp._core``; this package
re-exports it and adds a command-line shim.
"""

from cadp._core import (
    FlowModel,
    calibrate_noise_multiplier,
    clip_l1,
    dpsgd_epsilon,
    privatize,
    run_cli,
    sensitivity,
    wasserstein1,
)

__all__ = [
    "FlowModel",
    "calibrate_noise_multiplier",
    "clip_l1",
    "dpsgd_epsilon",
    "main",
    "privatize",
    "run_cli",
    "sensitivity",
    "wasserstein1",
]

__version__ = "0.1.0"


def main(argv=None):
    """Entry point for the ``cadp`` console script."""
    import sys

    code, out, err = run_cli(list(sys.argv[1:] if argv is None else argv))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
