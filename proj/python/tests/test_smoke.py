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
"""Smoke tests for the Python bindings."""

import json
import os
import pathlib

import numpy as np
import pytest

import cadp

SOURCE = pathlib.Path(os.environ.get("CADP_SOURCE_DIR", pathlib.Path(__file__).parents[2]))
TOY_FLOW = str(SOURCE / "tests" / "fixtures" / "toy_flow.json")


@pytest.fixture(scope="module")
def flow():
    return cadp.FlowModel.load(TOY_FLOW)


def _toy_rows(n=50, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 2))
    c = np.zeros((n, 2))
    c[np.arange(n), rng.integers(0, 2, n)] = 1.0
    return x, c


def test_flow_round_trip(flow):
    assert flow.dim == 2 and flow.cond_dim == 2
    assert flow.volume_preserving
    x, c = _toy_rows()
    z = flow.encode(x, c)
    np.testing.assert_allclose(flow.decode(z, c), x, atol=1e-10)
    ll = np.asarray(flow.log_likelihood(x, c))
    # Volume preserving: log p(x) is the standard normal density of z.
    expect = -0.5 * (z ** 2).sum(axis=1) - np.log(2 * np.pi)
    np.testing.assert_allclose(ll, expect, atol=1e-10)


def test_shape_errors(flow):
    with pytest.raises(ValueError):
        flow.encode(np.zeros((3, 5)))
    with pytest.raises(ValueError):
        flow.encode(np.zeros(3))


def test_privatize_is_seeded_and_noise_free_identity(flow):
    x, c = _toy_rows()
    a, warnings = cadp.privatize(flow, x, c, epsilon=1.0, sensitivity=1.0, seed=3)
    b, _ = cadp.privatize(flow, x, c, epsilon=1.0, sensitivity=1.0, seed=3)
    assert np.array_equal(a, b)
    assert isinstance(warnings, list)
    same, _ = cadp.privatize(flow, x, c, epsilon=1.0, sensitivity=1e9, clip_mode="clip_only",
                             add_noise=False)
    np.testing.assert_allclose(same, x, atol=1e-6)
    with pytest.raises(ValueError):
        cadp.privatize(flow, x, c, epsilon=0.0, sensitivity=1.0)


def test_zero_latent_rejected():
    z = np.ones((3, 2))
    z[1] = 0.0
    with pytest.raises(ValueError, match="zero"):
        cadp.clip_l1(z, 1.0)
    np.testing.assert_array_equal(cadp.clip_l1(z, 5.0, "clip_only"), z)


def test_clip_l1():
    z = np.random.default_rng(1).normal(size=(100, 4))
    out = cadp.clip_l1(z, 0.5)
    np.testing.assert_allclose(np.abs(out).sum(axis=1), 0.5, atol=1e-12)
    small = z / np.abs(z).sum(axis=1, keepdims=True) * 0.1
    np.testing.assert_array_equal(cadp.clip_l1(small, 0.5, "clip_only"), small)


def test_sensitivity_and_accountant():
    assert cadp.sensitivity("half_epsilon_capped", 10.0) == 4.0
    assert cadp.sensitivity("half_epsilon", 0.2) == 0.1
    r = cadp.dpsgd_epsilon(1.0, 64, 1000, 100)
    assert r["epsilon"] == min(r["basic"], r["advanced"])
    sigma = cadp.calibrate_noise_multiplier(2.0, 64, 1000, 100)
    assert cadp.dpsgd_epsilon(sigma, 64, 1000, 100)["epsilon"] <= 2.0


def test_wasserstein1():
    assert cadp.wasserstein1([0.0, 1.0], [1.0, 2.0]) == pytest.approx(1.0)


def test_cli_in_process(tmp_path):
    code, out, _ = cadp.run_cli(["--help"])
    assert code == 0 and "privatize" in out
    code, _, err = cadp.run_cli(["privatize", "--preset", "toy", "--model", TOY_FLOW,
                                 "--epsilon", "0", "--out", str(tmp_path / "p.csv")])
    assert code == 2 and err
    code, _, err = cadp.run_cli(["privatize", "--preset", "toy", "--model", TOY_FLOW,
                                 "--epsilon", "1", "--out", str(tmp_path / "p.csv")])
    assert code == 0, err
    manifest = json.loads((tmp_path / "p.csv.manifest.json").read_text())
    assert manifest["epsilon"] == 1.0
