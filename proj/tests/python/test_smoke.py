import json
import math

import pytest

import encs_lab as e


def case_study_savings():
    return e.per_action_savings(e.AgentEconomics(10.0, 30.0), e.ActionTimings(5.0, 10.0, 35.0))


def test_encs_gpt3_pe_row():
    r = e.encs(e.UsageDistribution(0.69, 0.14, 0.17), case_study_savings(), 0.0109)
    assert round(100 * r.per_message, 2) == 4.24
    assert math.isclose(r.per_message, r.gross_savings - r.generation_cost)
    assert round(e.annualize(r.per_message, 1_200_000)) == 50920


def test_savings_and_assisted_time():
    s = case_study_savings()
    assert math.isclose(s.s_use, 25 / 360)
    assert math.isclose(s.s_ignore, -5 / 360)
    t = e.average_assisted_time(e.UsageDistribution(0.7, 0.15, 0.15), e.ActionTimings(5, 10, 30))
    assert t == 9.5


def test_simplex_violation_raises_typed_error():
    with pytest.raises(e.EncsError) as info:
        e.encs(e.UsageDistribution(0.9, 0.9, 0.1), case_study_savings(), 0.0)
    assert info.value.code == "simplex_violation"
    assert isinstance(info.value, ValueError)


def test_as_given_normalization_keeps_raw_weights():
    u = e.UsageDistribution(0.57, 0.16, 0.28)
    s = case_study_savings()
    raw = e.encs(u, s, 0.000011, normalization="as_given").per_message
    renorm = e.encs(u, s, 0.000011).per_message
    assert raw > renorm


def test_simulation_is_reproducible():
    u = e.UsageDistribution(0.58, 0.20, 0.22)
    a = e.simulate_encs(u, case_study_savings(), 0.0025, 10_000, 7)
    b = e.simulate_encs(u, case_study_savings(), 0.0025, 10_000, 7)
    assert a.mean == b.mean and a.n == 10_000


def test_inference_cost():
    assert abs(e.gpu_hourly_rate(661.14, 243.33) - 2.72) < 0.005
    cents = 100 * e.self_hosted_cost_per_inference(0.620, 661.14, 243.33)
    assert abs(cents - 0.0468) <= 0.0001


def test_usability_model():
    assert math.isclose(e.perplexity([0.25] * 10), 4.0, rel_tol=1e-12)
    assert math.isclose(e.perplexity_from_logprobs([math.log(0.5)] * 3), 2.0, rel_tol=1e-12)
    kept, removed = e.iqr_filter([1, 2, 3, 4, 100])
    assert removed == [100] and kept == [1, 2, 3, 4]
    fit = e.ols_fit([1, 2, 3, 4, 5], [2, 1, 4, 3, 5])
    assert math.isclose(fit.slope, 0.8) and math.isclose(fit.intercept, 0.6)
    p = e.predict_ru_preset(4.27)
    assert abs(100 * p.p_use - 62.4) <= 0.1
    flat = e.LinearModel(0.0, 50.0)
    q = e.predict_ru(3.0, flat, e.LinearModel(0.0, 25.0), e.LinearModel(0.0, 25.0))
    assert (q.p_use, q.p_edit, q.p_ignore) == (0.5, 0.25, 0.25)


def test_annotation_stats():
    assert math.isclose(e.fleiss_kappa([[2, 0, 0], [1, 1, 0]]), -1 / 3)
    assert math.isclose(e.pearson_r([1, 2, 3], [1, 3, 2]), 0.5)
    with pytest.raises(e.EncsError) as info:
        e.pearson_r([1, 1, 1], [1, 2, 3])
    assert info.value.code == "degenerate"


def test_break_even():
    exact, ceiling = e.messages_to_break_even(1000.0, 0.05)
    assert math.isclose(exact, 20_000.0) and ceiling == 20_000.0
    with pytest.raises(e.EncsError) as info:
        e.messages_to_break_even(1000.0, 0.01, 0.02)
    assert info.value.code == "never_breaks_even"


def test_presets_and_scenarios():
    assert e.preset_version()
    names = {(p["kind"], p["name"]) for p in e.list_presets()}
    assert ("scenario", "ar_table4") in names
    csv = e.evaluate_preset("ar_table4", "csv")
    assert csv.splitlines()[0] == "model_id,encs_cents_per_message,encs_usd_per_year"
    report = json.loads(e.evaluate_scenario(e.scenario_json("appendix_k")))
    months = [round(r["break_even_months"], 2) for r in report["rows"]]
    assert months == [0.24, 0.29]
    with pytest.raises(e.EncsError) as info:
        e.evaluate_preset("ar_table4", "xml")
    assert info.value.code == "unknown_format"


def test_service_handler():
    status, body = e.handle_request("GET", "/api/v1/presets")
    assert status == 200 and "ar_table4" in json.loads(body)["scenarios"]
    status, body = e.handle_request(
        "POST", "/api/v1/breakeven",
        json.dumps({"c_rnd": 1, "encs": 0.0, "c_m": 0.0, "monthly_volume": 1}))
    assert status == 422
    assert json.loads(body)["error"]["code"] == "never_breaks_even"
