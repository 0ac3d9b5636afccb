from datetime import date, timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gotobi.calendar import (
    DayKind,
    DayLabel,
    PoolTooSmallError,
    TradingCalendar,
    closing_run_end,
    effective_gotobi_days,
    gotobi_dates,
    is_gotobi_date,
    label_range,
    non_gotobi_pool,
    sample_non_gotobi,
)

from oracles import effective_gotobi_oracle, weekday

WEEKENDS = TradingCalendar()


@pytest.mark.parametrize(
    "d, expected",
    [(date(2018, 5, 10), True), (date(2020, 2, 29), False), (date(2019, 12, 31), False), (date(2019, 1, 30), True)],
)
def test_is_gotobi_date(d, expected):
    assert is_gotobi_date(d) is expected


def _label_for(nominal, cal=WEEKENDS):
    (lab,) = effective_gotobi_days(nominal, nominal, cal)
    return lab


def test_sunday_gotobi_shifts_to_friday():
    assert weekday(date(2020, 4, 5)) == 6 and weekday(date(2020, 4, 3)) == 4
    lab = _label_for(date(2020, 4, 5))
    assert lab == DayLabel(date(2020, 4, 3), DayKind.GOTOBI_EFFECTIVE, date(2020, 4, 5))


def test_monday_gotobi_is_excluded():
    assert weekday(date(2019, 9, 30)) == 0
    lab = _label_for(date(2019, 9, 30))
    assert lab.kind is DayKind.EXCLUDED and lab.date == date(2019, 9, 30)


def test_business_thursday_is_itself():
    assert weekday(date(2018, 5, 10)) == 3
    assert _label_for(date(2018, 5, 10)).date == date(2018, 5, 10)


def test_holiday_shift_landing_on_monday_is_excluded():
    # 2020-05-05 is a Tuesday holiday; 05-04 is a holiday too and 05-03 a Sunday, so the
    # previous business day is Friday 05-01. A Tuesday holiday alone lands on Monday.
    cal = TradingCalendar(frozenset({date(2020, 5, 5)}))
    assert _label_for(date(2020, 5, 5), cal) == DayLabel(date(2020, 5, 4), DayKind.EXCLUDED, date(2020, 5, 5))
    assert _label_for(date(2020, 5, 5), TradingCalendar.default()).date == date(2020, 5, 1)


def test_golden_week_collision_keeps_earlier_source():
    # 2019-04-30 and 2019-05-05 both fall back to Friday 2019-04-26.
    labels = effective_gotobi_days(date(2019, 4, 26), date(2019, 5, 10), TradingCalendar.default())
    assert [(lab.date, lab.source_gotobi) for lab in labels] == [
        (date(2019, 4, 26), date(2019, 4, 30)),
        (date(2019, 5, 10), date(2019, 5, 10)),
    ]


def test_february_has_no_day_30_substitute():
    labels = effective_gotobi_days(date(2019, 2, 1), date(2019, 2, 28), WEEKENDS)
    assert [lab.source_gotobi.day for lab in labels] == [5, 10, 15, 20, 25]


def test_invalid_range():
    with pytest.raises(ValueError):
        effective_gotobi_days(date(2020, 1, 2), date(2020, 1, 1), WEEKENDS)


def test_default_calendar_drops_weekend_holidays():
    cal = TradingCalendar.default()
    assert all(d.weekday() < 5 for d in cal.holidays)
    assert date(2019, 5, 1) in cal.holidays
    assert date(2018, 12, 31) in cal.holidays
    assert not cal.is_business_day(date(2018, 12, 23))  # Sunday holiday, still closed


def test_holiday_csv(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text("date,name\n2020-04-07,x\n2020-04-11,weekend\n")
    cal = TradingCalendar.from_csv(p)
    assert cal.holidays == frozenset({date(2020, 4, 7)})
    p.write_text("date,name\n2020-13-01,x\n")
    with pytest.raises(ValueError, match="line 2"):
        TradingCalendar.from_csv(p)


holiday_sets = st.frozensets(st.dates(min_value=date(2019, 12, 1), max_value=date(2020, 3, 31)), max_size=25)


@settings(max_examples=200, deadline=None)
@given(
    st.dates(min_value=date(2020, 1, 1), max_value=date(2020, 2, 15)),
    st.integers(0, 60),
    holiday_sets,
)
def test_effective_days_match_enumeration_oracle(start, span, holidays):
    end = start + timedelta(days=span)
    cal = TradingCalendar(holidays)
    got = {lab.date: lab.kind.value for lab in effective_gotobi_days(start, end, cal)}
    assert got == effective_gotobi_oracle(start, end, cal.holidays)


@settings(max_examples=200, deadline=None)
@given(
    st.dates(min_value=date(2020, 1, 1), max_value=date(2020, 2, 15)),
    st.integers(0, 60),
    holiday_sets,
)
def test_shifting_properties(start, span, holidays):
    end = start + timedelta(days=span)
    cal = TradingCalendar(holidays)
    labels = effective_gotobi_days(start, end, cal)
    dates = [lab.date for lab in labels]
    assert dates == sorted(set(dates))
    for lab in labels:
        assert lab.date <= lab.source_gotobi
        assert start <= lab.source_gotobi <= end
        assert cal.is_business_day(lab.date)
        if lab.kind is DayKind.GOTOBI_EFFECTIVE:
            assert 1 <= weekday(lab.date) <= 4
        else:
            assert weekday(lab.date) == 0
    pool = set(non_gotobi_pool(start, end, cal))
    assert pool.isdisjoint(dates)
    picks = sample_non_gotobi(start, end, len(pool) // 2, cal, seed=7)
    assert set(picks) <= pool


def test_sample_count_zero_and_determinism():
    a, b = date(2018, 1, 1), date(2020, 12, 31)
    cal = TradingCalendar.default()
    assert sample_non_gotobi(a, b, 0, cal, seed=1) == []
    n = len(gotobi_dates(a, b, cal))
    first = sample_non_gotobi(a, b, n, cal, seed=2**64 - 1)
    assert first == sample_non_gotobi(a, b, n, cal, seed=2**64 - 1)
    assert first == sorted(set(first)) and len(first) == n
    assert set(first).isdisjoint(gotobi_dates(a, b, cal))
    assert first != sample_non_gotobi(a, b, n, cal, seed=3)


def test_sample_exhausts_a_one_week_pool():
    # Week of 2020-01-13 (Mon) .. 01-19 (Sun): Tue 14, Wed 15 (Gotobi), Thu 16, Fri 17.
    start, end = date(2020, 1, 13), date(2020, 1, 19)
    brute = [
        start + timedelta(days=k)
        for k in range(7)
        if 1 <= weekday(start + timedelta(days=k)) <= 4 and (start + timedelta(days=k)).day % 5
    ]
    assert brute == [date(2020, 1, 14), date(2020, 1, 16), date(2020, 1, 17)]
    assert sample_non_gotobi(start, end, 3, WEEKENDS, seed=11) == brute
    with pytest.raises(PoolTooSmallError) as exc:
        sample_non_gotobi(start, end, 4, WEEKENDS, seed=11)
    assert exc.value.pool_size == 3


def test_sample_within_restricts_pool():
    start, end = date(2020, 1, 13), date(2020, 1, 19)
    assert sample_non_gotobi(start, end, 1, WEEKENDS, seed=0, within=[date(2020, 1, 16)]) == [date(2020, 1, 16)]


def test_label_range_covers_tue_fri_business_days():
    a, b = date(2019, 1, 1), date(2019, 12, 31)
    cal = TradingCalendar.default()
    labels = label_range(a, b, cal)
    tue_fri = {a + timedelta(days=k) for k in range((b - a).days + 1)}
    tue_fri = {d for d in tue_fri if cal.is_business_day(d) and 1 <= weekday(d) <= 4}
    assert tue_fri <= {lab.date for lab in labels}
    for lab in labels:
        if lab.kind is not DayKind.EXCLUDED:
            assert lab.date in tue_fri or lab.date < a


def test_pool_excludes_day_claimed_by_source_past_range_end():
    cal = TradingCalendar.default()
    # Sunday 2019-06-30 shifts to Friday 2019-06-28
    assert closing_run_end(date(2019, 6, 28), cal) == date(2019, 6, 30)
    assert date(2019, 6, 28) not in non_gotobi_pool(date(2019, 6, 1), date(2019, 6, 28), cal)
    assert closing_run_end(date(2019, 6, 27), cal) == date(2019, 6, 27)
