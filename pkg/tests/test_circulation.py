import io

import pytest
from hypothesis import given, strategies as st

from helpers import example_circulation, example_roster, trip
from mlcp.circulation import (Circulation, CirculationFormatError, Trip, UnitRoster, classify_mo,
                              encode_time, extract_mos, format_clock, parse_clock,
                              read_circulation_csv, read_mos_csv, truncate, validate_circulation,
                              write_circulation_csv, write_mos_csv)


# ------------------------------------------------------------------ time encoding

def test_encode_time_examples():
    assert encode_time(4, "09:30") == 81.5
    assert encode_time(4, "13:15") == 85.25
    assert encode_time(1, "00:00") == 0.0


@pytest.mark.parametrize("bad", ["24:00", "7:60", "0930", "", "ab:cd"])
def test_parse_clock_rejects(bad):
    with pytest.raises(CirculationFormatError):
        parse_clock(bad)


def test_encode_time_rejects_day_zero():
    with pytest.raises(ValueError):
        encode_time(0, "10:00")


@given(st.integers(1, 60), st.integers(0, 23), st.integers(0, 59))
def test_encode_time_roundtrip(day, hh, mm):
    clock = f"{hh:02d}:{mm:02d}"
    t = encode_time(day, clock)
    assert t == ((day - 1) * 1440 + hh * 60 + mm) / 60
    assert format_clock(int(round(t * 60))) == clock


# ------------------------------------------------------------------ classification

def test_classify_examples():
    assert classify_mo(encode_time(1, "10:41"), encode_time(1, "16:19"))
    assert not classify_mo(encode_time(1, "19:52"), encode_time(1, "20:09"))
    assert not classify_mo(encode_time(1, "23:31"), encode_time(2, "00:01"))
    assert not classify_mo(encode_time(2, "01:06"), encode_time(2, "05:34"))
    assert not classify_mo(11.0, 19 + 1 / 60)


def test_classify_window_edges():
    assert classify_mo(7.0, 18 + 59 / 60)
    assert not classify_mo(6 + 59 / 60, 12.0)
    assert not classify_mo(12.0, 19.0)
    # spanning midnight is never daytime under the default rule
    assert not classify_mo(10.0, 24 + 10.0)


def test_classify_clock_string_bounds():
    assert classify_mo(8.0, 17.0, "08:00", "17:30")
    assert not classify_mo(8.0, 17.5, "08:00", "17:30")


def test_classify_formula_variant_tests_end_only():
    assert classify_mo(5.0, 10.0, classification="formula")
    assert not classify_mo(5.0, 10.0)
    assert classify_mo(23.0, 24 + 8.0, classification="formula")


def test_classify_unknown_rule():
    with pytest.raises(ValueError):
        classify_mo(8.0, 9.0, classification="sun")


@given(st.integers(0, 24 * 60 * 10), st.integers(1, 24 * 60 * 3), st.integers(-5, 5))
def test_classify_shift_by_whole_days(start, length, days):
    s, e = start / 60, (start + length) / 60
    shift = 24 * max(days, -(start // (24 * 60)))
    assert classify_mo(s, e) == classify_mo(s + shift, e + shift)


@given(st.integers(0, 24 * 60 * 3), st.integers(1, 24 * 60 * 2))
def test_prose_day_implies_formula_day(start, length):
    s, e = start / 60, (start + length) / 60
    if classify_mo(s, e):
        assert classify_mo(s, e, classification="formula")


# ------------------------------------------------------------------ validation

def test_example_roster_is_valid():
    assert validate_circulation(example_circulation()) == []


def _rules(trips, horizon=48 * 60):
    return [v.rule for v in validate_circulation(Circulation.from_trips(trips, horizon))]


def test_station_continuity_violation():
    trips = example_roster()
    trips[2] = trip("r1", "Gvc", 1, "20:09", "Mt", 1, "23:31")
    assert _rules(trips) == ["station-continuity"]


def test_overlap_violation():
    trips = example_roster()
    trips[1] = trip("r1", "Hrl", 1, "10:30", "Ekz", 1, "19:52")
    assert "overlap" in _rules(trips)


def test_zero_duration_violation():
    trips = [trip("u", "A", 1, "10:00", "B", 1, "10:00")]
    assert _rules(trips) == ["positive-duration"]


def test_horizon_violation():
    trips = [trip("u", "A", 2, "10:00", "B", 2, "11:00")]
    assert _rules(trips, horizon=24 * 60) == ["horizon"]


def test_duplicate_unit_violation():
    r = UnitRoster("u", (trip("u", "A", 1, "10:00", "B", 1, "11:00"),))
    assert [v.rule for v in validate_circulation(Circulation((r, r), 24 * 60))] == ["duplicate-unit"]


def test_violation_indices_are_one_based_after_sorting():
    trips = [trip("u", "B", 1, "12:00", "C", 1, "13:00"), trip("u", "A", 1, "10:00", "X", 1, "11:00")]
    v, = validate_circulation(Circulation.from_trips(trips, 24 * 60))
    assert (v.unit_id, v.trip_index, v.rule) == ("u", 2, "station-continuity")


# ------------------------------------------------------------------ extraction

def test_example_roster_mos_without_boundaries():
    mos = extract_mos(example_circulation(), include_boundaries=False)["r1"]
    got = [(m.location, m.start, m.end, m.is_day) for m in mos]
    assert got == [
        ("Hrl", encode_time(1, "10:41"), encode_time(1, "16:19"), True),
        ("Ekz", encode_time(1, "19:52"), encode_time(1, "20:09"), False),
        ("Mt", encode_time(1, "23:31"), encode_time(2, "00:01"), False),
        ("Ehv", encode_time(2, "01:06"), encode_time(2, "05:34"), False),
    ]
    assert [m.index_j for m in mos] == [1, 2, 3, 4]


def test_example_roster_boundary_mos():
    mos = extract_mos(example_circulation())["r1"]
    assert len(mos) == 6
    assert (mos[0].location, mos[0].start_min, mos[0].end_min) == ("Ekz", 0, 7 * 60 + 9)
    assert (mos[-1].location, mos[-1].end_min) == ("Amr", 48 * 60)
    assert not mos[0].is_day  # starts at 00:00


def test_back_to_back_trips_give_no_mo():
    trips = [trip("u", "A", 1, "10:00", "B", 1, "11:00"), trip("u", "B", 1, "11:00", "C", 1, "12:00")]
    mos = extract_mos(Circulation.from_trips(trips, 24 * 60), include_boundaries=False)
    assert mos == {"u": []}


def test_extract_rejects_invalid():
    trips = [trip("u", "A", 1, "10:00", "B", 1, "11:00"), trip("u", "C", 1, "12:00", "D", 1, "13:00")]
    with pytest.raises(ValueError, match="station-continuity"):
        extract_mos(Circulation.from_trips(trips, 24 * 60))


@st.composite
def rosters(draw):
    n = draw(st.integers(1, 8))
    t = draw(st.integers(0, 600))
    station = "S0"
    trips = []
    for i in range(n):
        t += draw(st.integers(0, 600))
        dur = draw(st.integers(1, 300))
        nxt = f"S{draw(st.integers(0, 3))}"
        trips.append(Trip("u", station, t, nxt, t + dur))
        station, t = nxt, t + dur
    return Circulation.from_trips(trips, t + draw(st.integers(0, 600)))


@given(rosters())
def test_mos_partition_the_idle_time(circ):
    mos = extract_mos(circ)["u"]
    busy = sum(t.arr_min - t.dep_min for t in circ.rosters[0].trips)
    assert busy + sum(m.length_min for m in mos) == circ.horizon_min
    for a, b in zip(mos, mos[1:]):
        assert a.end_min < b.start_min
    assert all(m.length_min > 0 for m in mos)


@given(rosters(), st.integers(1, 5))
def test_shift_invariance_of_classification(circ, days):
    shift = days * 24 * 60
    moved = Circulation.from_trips(
        [Trip(t.unit_id, t.dep_station, t.dep_min + shift, t.arr_station, t.arr_min + shift)
         for t in circ.rosters[0].trips], circ.horizon_min + shift)
    a = extract_mos(circ, include_boundaries=False)["u"]
    b = extract_mos(moved, include_boundaries=False)["u"]
    assert [m.is_day for m in a] == [m.is_day for m in b]


# ------------------------------------------------------------------ truncation and CSV

def test_truncate_clamps_running_trip():
    trips = [trip("u", "A", 1, "22:00", "B", 2, "02:00"), trip("u", "B", 2, "06:00", "C", 2, "07:00")]
    cut = truncate(Circulation.from_trips(trips, 48 * 60), 1)
    assert cut.horizon_min == 24 * 60
    t, = cut.rosters[0].trips
    assert t.arr_min == 24 * 60
    assert validate_circulation(cut) == []
    assert extract_mos(cut)["u"][-1].end_min == 22 * 60


def test_circulation_csv_roundtrip():
    circ = example_circulation()
    text = write_circulation_csv(circ)
    assert text.splitlines()[0] == "unit_id,dep_station,dep_day,dep_clock,arr_station,arr_day,arr_clock"
    assert "r1,Mt,2,00:01,Ehv,2,01:06" in text
    back = read_circulation_csv(io.StringIO(text), 48 * 60)
    assert back == circ


def test_csv_default_horizon_is_whole_days():
    text = "unit_id,dep_station,dep_day,dep_clock,arr_station,arr_day,arr_clock\nu,A,1,10:00,B,2,01:00\n"
    assert read_circulation_csv(io.StringIO(text)).horizon_min == 48 * 60


@pytest.mark.parametrize("text", [
    "",
    "unit,dep\n",
    "unit_id,dep_station,dep_day,dep_clock,arr_station,arr_day,arr_clock\nu,A,1,10:00,B,1\n",
    "unit_id,dep_station,dep_day,dep_clock,arr_station,arr_day,arr_clock\nu,A,x,10:00,B,1,11:00\n",
    "unit_id,dep_station,dep_day,dep_clock,arr_station,arr_day,arr_clock\nu,A,1,25:00,B,1,11:00\n",
])
def test_csv_format_errors(text):
    with pytest.raises(CirculationFormatError):
        read_circulation_csv(io.StringIO(text))


def test_mo_csv_roundtrip():
    mos = extract_mos(example_circulation())
    text = write_mos_csv(mos)
    assert "r1,2,Hrl,10.683333,16.316667,1" in text
    assert read_mos_csv(io.StringIO(text)) == mos
