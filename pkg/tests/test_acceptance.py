# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

import json

import pytest

from wcanon.build_wcanon import build_superpotential, load_config, OUTPUT_DIR_ENV
from wcanon.eval.acceptance import CHECKS, describe, run_acceptance
from wcanon.modeling.superpotential import validate
from wcanon.utils.errors import ConfigError, RejectEvenLeadingPower


class TestLoadConfig:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
        cfg = load_config()
        assert list(cfg.superpotential.coeffs) == [1.0, 0.0, 1.0]
        assert cfg.output_dir == "outputs"
        # interpolations are resolved
        assert list(cfg.verify.alphas) == list(cfg.alphas)

    def test_precedence(self, tmp_path, monkeypatch):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"grid": {"N": 64}}))
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
        cfg = load_config(overrides=["grid.N=32", "output_dir=elsewhere"], json_file=str(path))
        assert cfg.grid.N == 64
        assert cfg.output_dir == str(tmp_path)

    def test_bare_descriptor(self, tmp_path):
        path = tmp_path / "cube.json"
        path.write_text(json.dumps({"coeffs": [0.0, 0.0, 1.0]}))
        cfg = load_config(json_file=str(path))
        assert build_superpotential(cfg.superpotential).coeffs == (0.0, 0.0, 1.0)

    def test_json_must_be_an_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            load_config(json_file=str(path))


def test_rejection_is_not_wrapped():
    cfg = load_config(overrides=["superpotential.coeffs=[0.0,1.0]"])
    with pytest.raises(RejectEvenLeadingPower):
        build_superpotential(cfg.superpotential)


@pytest.mark.parametrize(
    "coeffs, text",
    [([1.0], "x"), ([1.0, 0.0, 1.0], "x+x^3"), ([0.0, 0.0, 2.0], "2*x^3")],
)
def test_describe(coeffs, text):
    assert describe(validate(coeffs)) == text


class TestRunAcceptance:
    def test_selected_families_pass(self):
        cfg = load_config(overrides=["verify.operator_grid.N=256"])
        results = run_acceptance(cfg, ["coherent", "similarity", "wigner"], quiet=True)
        names = [r.name for r in results]
        assert names[:2] == ["coherent_residual", "coherent_overlap"]
        assert "similarity[x+x^3,alpha=0.3]" in names
        assert "wigner_mass" in names
        assert all(r.passed for r in results), [r for r in results if not r.passed]

    def test_alpha_independence_reports_both_realizations(self):
        cfg = load_config(overrides=["verify.operator_grid.N=256"])
        results = {r.name: r for r in run_acceptance(cfg, ["alpha_independence"], quiet=True)}
        assert set(results) == {
            "alpha_independence[x+x^3,ordering_average]",
            "alpha_independence[x+x^3,half_density]",
        }
        assert all(r.passed for r in results.values()), list(results.values())
        average = results["alpha_independence[x+x^3,ordering_average]"]
        assert average.bound == cfg.tolerances.alpha_spread_slack
        assert average.detail.startswith("spreads ")

    def test_checks_come_from_the_config(self):
        cfg = load_config(overrides=["verify.checks=[coherent]"])
        assert {r.name for r in run_acceptance(cfg, quiet=True)} == {
            "coherent_residual",
            "coherent_overlap",
        }

    def test_unknown_family(self):
        with pytest.raises(ConfigError):
            run_acceptance(load_config(), ["coherent", "astrology"], quiet=True)

    def test_every_family_is_registered(self):
        assert len(CHECKS) == 13
