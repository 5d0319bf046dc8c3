# Copyright 2026 The offset_track Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http:#www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import numpy as np
import pytest

import offset_track as ot


MINIMAL = """
schema_version = 1
[scenario]
path = "validation"
controller = "predictive"
"""


def test_version_string():
    assert ot.__version__.count(".") == 2


def test_validation_path_geometry():
    path = ot.build_validation_path()
    assert path.segment_count == 6
    assert path.max_abs_curvature() == pytest.approx(0.1)
    mirrored = path.mirrored()
    s = 0.5 * path.total_length
    assert mirrored.curvature_at(s) == pytest.approx(-path.curvature_at(s))


def test_suite_is_deterministic():
    a = ot.generate_suite(2024, 3)
    b = ot.generate_suite(2024, 3)
    assert [p.total_length for p in a] == [p.total_length for p in b]
    assert all(100.0 <= p.total_length <= 300.0 for p in a)


def test_implement_error_on_straight_line():
    e = ot.implement_error(ot.FrenetState(0.0, 0.3, 0.0), 0.0, ot.ImplementOffset(2.0, 0.5))
    assert e["e_I"] == pytest.approx(0.8)


def test_horizon_sums_closed_form():
    s1, s2, s3, _ = ot.horizon_sums(0.15, 0.1, 10)
    ks = 0.1 * np.arange(1, 11)
    assert s1 == pytest.approx(ks.sum())
    assert s2 == pytest.approx((ks**2).sum())
    assert s3 == pytest.approx((ks**3).sum())


def test_minimal_config_defaults():
    cfg = ot.parse_config(MINIMAL)
    assert cfg.speed == 1.0
    assert cfg.lambda_ == 0.15
    assert cfg.k_psi == 0.6
    assert cfg.controller == "predictive"


def test_unknown_key_names_the_key():
    with pytest.raises(ot.ConfigError, match="foo"):
        ot.parse_config(MINIMAL + "foo = 1\n")


def test_infeasible_offset_rejected():
    with pytest.raises(ot.FeasibilityError):
        ot.parse_config(MINIMAL, {"offset.lateral": "11"})


def test_simulate_returns_finite_log():
    cfg = ot.parse_config(MINIMAL, {"offset.longitudinal": "-2", "offset.lateral": "-0.5"})
    (result,) = ot.simulate(cfg)
    log = result["log"]
    assert not result["aborted"]
    assert len(log["t"]) > 100
    assert np.all(np.isfinite(log["delta_cmd"]))
    assert result["metrics"]["median"] < 0.15
    assert math.isclose(result["metrics"]["max"], np.max(np.abs(log["e_true"])), rel_tol=1e-12)


def test_compare_rows_and_artifacts(tmp_path):
    cfg = ot.parse_config(
        MINIMAL,
        {"offset.longitudinal": "-2", "offset.lateral": "-0.5",
         "output.dir": str(tmp_path)},
    )
    rows = ot.compare(cfg)
    assert [r["controller"] for r in rows] == ["predictive", "backstepping"]
    assert all(r["ok"] for r in rows)

    outcome = ot.run_command(cfg, "compare")
    assert outcome["ok"]
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "compare"
    assert manifest["config_hash"].startswith("fnv1a64:")
    assert (tmp_path / "comparison.csv").read_text().startswith("controller,observer,status")
    assert not list(tmp_path.glob("*.tmp.*"))
