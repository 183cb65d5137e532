import math

import numpy as np
import pytest

import canonlink as cl

TABLE1 = "x,z,events,trials\n0,1,10,200\n0,0,20,200\n1,1,90,200\n1,0,80,200\n"


def test_parse_and_example_agree():
    table = cl.parse_cell_csv(TABLE1)
    assert table == cl.example_trial()
    assert len(table) == 4
    assert table.total_trials == 800
    assert table.is_balanced()
    assert cl.render_cell_csv(table) == TABLE1


def test_bad_input_raises_value_error():
    with pytest.raises(ValueError, match="row 2"):
        cl.parse_cell_csv("x,z,events,trials\n0,1,1,10\n0,0,11,10\n")
    with pytest.raises(ValueError, match="unknown link"):
        cl.fit_glm(cl.example_trial(), "banana", True)


def test_fit_matches_worked_example():
    table = cl.example_trial()
    fit = cl.fit_glm(table, "identity", adjusted=True)
    assert fit.converged
    assert fit.status == cl.FitStatus.converged
    assert isinstance(fit.coefficients, np.ndarray)
    assert fit.coefficients.shape == (3,)
    assert fit.covariance.shape == (3, 3)
    assert abs(fit.treatment - -0.028) <= 5e-4
    assert abs(fit.standard_errors[1] - 0.023) <= 5e-4

    logit = cl.fit_glm(table, cl.LinkKind.logit, adjusted=True)
    assert abs(logit.treatment) <= 1e-8
    assert '"link": "logit"' in logit.to_json()


def test_marginal_effects():
    table = cl.example_trial()
    probit = cl.fit_glm(table, "probit", True)
    eff = cl.standardized_risk_difference(probit, table)
    assert eff.method == cl.EffectMethod.standardization
    assert eff.link == cl.LinkKind.probit
    assert abs(eff.estimate - -0.006) <= 5e-4
    assert abs(eff.std_error - 0.028) <= 5e-4

    iptw = cl.iptw_risk_difference(cl.CellTable([(0, 1, 1, 10), (0, 0, 2, 20), (1, 1, 9, 20), (1, 0, 8, 10)]))
    assert iptw.link is None
    assert math.isclose(iptw.estimate, -0.175, rel_tol=1e-12)

    with pytest.raises(ValueError, match="positivity"):
        cl.iptw_risk_difference(cl.CellTable([(0, 1, 10, 200), (0, 0, 20, 200), (1, 1, 90, 200)]))
    with pytest.raises(ValueError, match="link mismatch"):
        cl.coefficient_risk_difference(cl.fit_glm(table, "logit", True))


def test_null_preservation():
    table = cl.example_trial()
    assert cl.null_preservation_check("logit", table) == cl.NullPreservation.holds
    assert cl.null_preservation_check("identity", table) == cl.NullPreservation.fails


def test_grid():
    spec = cl.GridSpec()
    assert spec.dataset_count() == 1296
    spec.high = 12
    records = cl.run_grid(spec)
    assert len(records) == 16
    assert records[0].events == [10, 10, 10, 10]
    report = cl.pattern_checks(records)
    assert report.canonical_pattern_holds
    assert report.find(cl.LinkKind.logit).extremeness_violations == 0


def test_cli_in_process():
    code, out, err = cl.run_cli(["fit", "--data", "/nonexistent.csv", "--link", "logit", "--adjusted"])
    assert code == 1
    assert out == ""
    assert "cannot read" in err
