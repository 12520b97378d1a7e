# Copyright 2026 The qkdlab Authors
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

"""Smoke tests for the Python bindings and the command-line tool."""

import csv
import io
import json
import math
import os
import subprocess

import pytest

import qkdlab

CLI = os.environ.get("QKDLAB_CLI")
DATA = os.environ.get("QKDLAB_TEST_DATA", os.path.join(os.path.dirname(__file__), "..", "data"))


def test_rate_matches_entropy_formula():
    assert qkdlab.asymptotic_rate(0.05, 0, 0, 0) == pytest.approx(1 - 2 * qkdlab.binary_entropy(0.1))
    assert qkdlab.asymptotic_rate(0.05, 0, 0, 0) == pytest.approx(0.0620, abs=5e-4)


def test_ideal_source_certified():
    report = qkdlab.verify_ideal_source()
    assert report["passed"]
    assert max(report["residuals"].values()) < 1e-12


def test_tilted_source_gamma():
    with open(os.path.join(DATA, "tilted_source.json")) as f:
        report = qkdlab.verify_source_json(f.read())
    assert report["passed"]
    assert report["gamma_qp"] == pytest.approx(2 * math.sin(0.05), abs=1e-9)


def test_bad_config_raises_value_error():
    with pytest.raises(ValueError):
        qkdlab.verify_source_json('{"kind": "ideal", "bogus": 1}')


def test_helstrom():
    zero = [[1, 0], [0, 0]]
    plus = [[0.5, 0.5], [0.5, 0.5]]
    assert qkdlab.helstrom_bound(zero, plus, 1) == pytest.approx(0.5 + math.sqrt(2) / 4)


def test_gv_code_and_decoder():
    code = qkdlab.gv_code(7, 1, 3)
    assert code["r"] == 4 and code["min_distance"] >= 3
    word = "0" * 7
    for i in range(7):
        y = "".join("1" if j == i else "0" for j in range(7))
        assert qkdlab.syndrome_decode(code["rows"], 1, y, "0000") == word


def test_tail_and_privacy():
    exact, bound, holds = qkdlab.binomial_tail(0.5, 0.5, 0.1, 10, 10)
    assert holds and bound == pytest.approx(math.exp(-0.4))
    assert qkdlab.eps1(2000, 100, 0.1) > qkdlab.eps1(20000, 1000, 0.1)


def test_simulate_deterministic():
    with open(os.path.join(DATA, "sim_noiseless.json")) as f:
        config = f.read()
    first = qkdlab.simulate_csv(config, 9, 10)
    assert first == qkdlab.simulate_csv(config, 9, 10)
    rows = list(csv.DictReader(io.StringIO(first)))
    assert len(rows) == 10
    assert all(r["status"] == "completed" and r["key_equal"] == "1" for r in rows)


@pytest.mark.skipif(CLI is None, reason="QKDLAB_CLI not set")
def test_cli_matches_bindings():
    out = subprocess.run([CLI, "--seed", "9", "--trials", "10", "simulate", os.path.join(DATA, "sim_noiseless.json")],
                         capture_output=True, text=True, check=True).stdout
    with open(os.path.join(DATA, "sim_noiseless.json")) as f:
        assert out == qkdlab.simulate_csv(f.read(), 9, 10)


@pytest.mark.skipif(CLI is None, reason="QKDLAB_CLI not set")
def test_cli_bounds_json():
    proc = subprocess.run([CLI, "--seed", "1", "bounds", "tails"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)[0]["violations"] == 0
