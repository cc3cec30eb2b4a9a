import random
from datetime import date

import pytest
from hypothesis import given, strategies as st

from sbs_forecast.errors import ConfigError, EmptyDataError, NonPositiveScoreError, UndefinedApeError
from sbs_forecast.forecast import (
    ElectionOutcome, adjust_actuals, ape, evaluate, forecast_shares, mae, mape, poll_average, polls_by_week,
    rank_compare, read_polls_csv, write_eval_csv,
)
from sbs_forecast.ingest import PollRecord, WeekWindow

GE_OFFICIAL = {"m5s": 0.3266, "pd": 0.1872, "lega": 0.1737, "fi": 0.1401, "fdi": 0.0435, "leu": 0.0339}
GE_FORECAST = {"m5s": 0.2626, "pd": 0.1974, "lega": 0.1813, "fi": 0.2726, "fdi": 0.0473, "leu": 0.0387}


def test_shares_two_candidates():
    fs = forecast_shares({"raggi": 59.64, "giachetti": 29.95}, "sbs")
    assert fs.shares["raggi"] == pytest.approx(0.6657, abs=1e-4)
    assert fs.shares["giachetti"] == pytest.approx(0.3343, abs=1e-4)
    fs = forecast_shares({"raggi": 28.74, "giachetti": 15.90}, "prevalence")
    assert fs.shares["raggi"] == pytest.approx(0.6438, abs=1e-4)
    assert fs.basis == "prevalence"


def test_equal_scores_split_evenly():
    assert forecast_shares({"a": 3.3, "b": 3.3}).shares == {"a": 0.5, "b": 0.5}


def test_non_positive_scores():
    with pytest.raises(NonPositiveScoreError, match="b=-1.0"):
        forecast_shares({"a": 2.0, "b": -1.0}, clamp=False)
    fs = forecast_shares({"a": 2.0, "b": -1.0, "c": 0.0})
    assert fs.clamped == ("b", "c")
    assert fs.shares["b"] == pytest.approx(0.01 / 2.02)


@given(st.dictionaries(st.sampled_from("abcdef"), st.floats(1e-3, 1e3), min_size=1),
       st.floats(1e-3, 1e3))
def test_shares_sum_and_scale_invariance(scores, c):
    a = forecast_shares(scores)
    b = forecast_shares({k: v * c for k, v in scores.items()})
    assert abs(sum(a.shares.values()) - 1) <= 1e-9
    assert all(abs(a.shares[k] - b.shares[k]) <= 1e-12 for k in scores)


def test_adjust_actuals():
    out = adjust_actuals(GE_OFFICIAL, GE_OFFICIAL)
    assert out.adjusted["m5s"] == pytest.approx(0.3609, abs=1e-4)
    assert sum(out.adjusted.values()) == pytest.approx(1, abs=1e-9)
    assert adjust_actuals({"raggi": 0.35, "x": 0.2}, ["raggi"]).adjusted == {"raggi": 1.0}
    with pytest.raises(ConfigError):
        adjust_actuals({"a": 0.5}, ["a", "b"])


def test_adjust_idempotent():
    once = adjust_actuals(GE_OFFICIAL, GE_OFFICIAL)
    twice = adjust_actuals(once.adjusted, GE_OFFICIAL)
    assert all(abs(once.adjusted[k] - twice.adjusted[k]) < 1e-15 for k in GE_OFFICIAL)


def test_ape():
    assert ape(0.4090, 0.4250) == pytest.approx(0.0391, abs=1e-4)
    assert ape(0.6715, 0.6657) == pytest.approx(0.0087, abs=1e-4)
    assert ape(0.3, 0.3) == 0
    with pytest.raises(UndefinedApeError):
        ape(0, 0.1)


def test_mape_mae_basics():
    pairs = [(0.3, 0.3), (0.7, 0.7)]
    assert mape(pairs) == 0 and mae(pairs) == 0
    with pytest.raises(EmptyDataError):
        mape([])
    with pytest.raises(EmptyDataError):
        mae([])


def test_mape_asymmetry_mae_symmetry():
    assert ape(1, 6) == 5.0
    assert ape(40, 45) == 0.125
    assert mae([(1, 6)]) == mae([(6, 1)]) == mae([(40, 45)])
    assert ape(6, 1) != ape(1, 6)


def test_rank_compare_general_election():
    outcome = adjust_actuals(GE_OFFICIAL, GE_OFFICIAL)
    real, fc, n = rank_compare(outcome, forecast_shares(GE_FORECAST))
    assert [real[k] for k in ("m5s", "pd", "lega", "fi", "fdi", "leu")] == [1, 2, 3, 4, 5, 6]
    assert [fc[k] for k in ("m5s", "pd", "lega", "fi", "fdi", "leu")] == [2, 3, 4, 1, 5, 6]
    assert n == 4


def test_rank_compare_simple_and_ties():
    assert rank_compare({"a": 0.6, "b": 0.4}, {"a": 0.6, "b": 0.4})[2] == 0
    assert rank_compare({"a": 0.6, "b": 0.4}, {"a": 0.4, "b": 0.6})[2] == 2
    real, _, _ = rank_compare({"b": 0.5, "a": 0.5}, {"a": 0.5, "b": 0.5})
    assert real == {"a": 1, "b": 2}


def test_rank_invariant_under_monotone_transform():
    rng = random.Random(2)
    for _ in range(50):
        y = {k: rng.random() for k in "abcde"}
        f = {k: rng.random() for k in "abcde"}
        base = rank_compare(y, f)
        t = rank_compare({k: v ** 3 + 2 for k, v in y.items()}, {k: v ** 3 + 2 for k, v in f.items()})
        assert base == t


def test_poll_average():
    p1 = PollRecord(date(2016, 11, 1), {"yes": 0.40, "no": 0.60})
    p2 = PollRecord(date(2016, 11, 2), {"yes": 0.42, "no": 0.58})
    avg = poll_average([p1, p2])
    assert avg.shares["yes"] == pytest.approx(0.41)
    assert poll_average([p1]).shares == {"no": 0.6, "yes": 0.4}
    assert poll_average([]) is None


def test_poll_average_three_polls_drops_others():
    polls = [
        PollRecord(date(2016, 5, 2), {"raggi": 0.30, "giachetti": 0.24, "meloni": 0.20, "others": 0.26}),
        PollRecord(date(2016, 5, 3), {"raggi": 0.27, "giachetti": 0.26, "meloni": 0.22, "others": 0.25}),
        PollRecord(date(2016, 5, 5), {"raggi": 0.33, "giachetti": 0.22, "meloni": 0.21, "others": 0.24}),
    ]
    # hand average: raggi 0.30, giachetti 0.24, meloni 0.21 -> total 0.75
    avg = poll_average(polls, ["raggi", "giachetti", "meloni"])
    assert avg.shares["raggi"] == pytest.approx(0.30 / 0.75)
    assert avg.shares["giachetti"] == pytest.approx(0.24 / 0.75)
    assert avg.shares["meloni"] == pytest.approx(0.21 / 0.75)
    assert "others" not in avg.shares


def test_polls_csv_and_weeks(tmp_path):
    p = tmp_path / "polls.csv"
    p.write_text("date,option,share,pollster\n2016-05-02,a,0.6,x\n2016-05-02,b,0.4,x\n"
                 "2016-05-02,a,0.5,y\n2016-05-02,b,0.5,y\n2016-06-05,a,0.1,z\n")
    polls = read_polls_csv(p)
    assert len(polls) == 3
    weeks = polls_by_week(polls, date(2016, 6, 5))
    assert list(weeks) == [WeekWindow(2016, 18, 5)]
    assert poll_average(weeks[WeekWindow(2016, 18, 5)]).shares == {"a": 0.55, "b": 0.45}


def test_polls_csv_errors(tmp_path):
    p = tmp_path / "polls.csv"
    p.write_text("date,share\n")
    with pytest.raises(ConfigError):
        read_polls_csv(p)
    p.write_text("date,option,share\n2016-05-02,a,0.6\n2016-05-02,a,0.5\n")
    with pytest.raises(ConfigError):
        read_polls_csv(p)


def test_evaluate_report(tmp_path):
    outcome = ElectionOutcome({"yes": 0.409, "no": 0.591}, {"yes": 0.409, "no": 0.591})
    report = evaluate(outcome, forecast_shares({"yes": 0.425, "no": 0.575}))
    assert report.mape == pytest.approx((0.016 / 0.409 + 0.016 / 0.591) / 2)
    assert report.mae_pp == pytest.approx(1.6)
    assert report.n_misranked == 0
    path = tmp_path / "e.csv"
    write_eval_csv(report, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "option,actual,adjusted_actual,forecast,abs_error_pp,ape,real_rank,forecast_rank"
    assert lines[-2].startswith("MAPE,") and lines[-1].startswith("MAE,")
