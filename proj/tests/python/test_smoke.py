"""Smoke tests for the _pedebate extension module."""

import json
import math

import _pedebate as pd


def test_projection():
    p = pd.project_to_simplex([0.5, 0.7])
    assert math.isclose(p[0], 0.4, abs_tol=1e-12)
    assert math.isclose(p[1], 0.6, abs_tol=1e-12)
    q = pd.project_to_simplex([-1.0, 2.0])
    assert q == [0.0, 1.0]
    r = pd.project_to_simplex([0.3, 0.2])
    assert math.isclose(r[0], 0.55, abs_tol=1e-12)


def test_kappa():
    assert pd.kappa_for(8, 0.05) == 15
    k = pd.kappa_for(1, 0.1)
    assert k % 2 == 1 and k > 3


def test_stability_controls():
    bad = pd.check_stability("and", 2, 1, [1.0, 1.0], 0.1, 0.5)
    assert not bad["stable"]
    assert math.isclose(bad["worst_gap"], 0.19, abs_tol=1e-12)
    good = pd.check_stability("and", 1, 3, [1.0, 1.0, 1.0], 0.1, 0.5)
    assert good["stable"]
    assert math.isclose(good["worst_gap"], 0.028, abs_tol=1e-12)


def test_stackelberg():
    eqs = pd.stackelberg([[1.0, -1.0], [2.0, 0.0]], 0.0)
    assert len(eqs) == 1
    assert eqs[0]["leader"] == 1
    assert eqs[0]["leader_value"] == 0.0


def test_debate_roundtrip():
    transcripts = json.loads(pd.run_debate("interval_q3_d2", 7, "honest", "truthful"))
    assert len(transcripts) == 2
    r_top = 0.025 ** 3
    for run in transcripts:
        assert math.isclose(float(run["total_payoff"]), r_top, rel_tol=1e-9)
    # determinism
    again = json.loads(pd.run_debate("interval_q3_d2", 7, "honest", "truthful"))
    assert transcripts == again


def test_expected_payoff():
    v = pd.expected_payoff("interval_q3_d2", "honest", "truthful")
    assert math.isclose(v, 0.025 ** 3, rel_tol=1e-9)


def test_suite():
    result = pd.run_suite("stability")
    assert result["pass"]
    assert any(rec["metric"] == "maj3_gap" for rec in result["records"])


def main():
    tests = [v for k, v in globals().items() if k.startswith("test_") and callable(v)]
    for test in tests:
        test()
        print(f"{test.__name__}: ok")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    main()
