from __future__ import annotations

import pytest

from taxisentinel.errors import MalformedFileError
from taxisentinel.transcripts import (
    InfoRow,
    Utterance,
    build_info_table,
    carry_forward,
    classify_dest_runway,
    parse_time,
)


def test_parse_time_formats():
    assert parse_time("17:43:02") == 17 * 3600 + 43 * 60 + 2
    assert parse_time("0:08") == 8
    assert parse_time("1:27") == 87
    with pytest.raises(MalformedFileError):
        parse_time("not-a-time")


def test_classify_dest_runway():
    assert classify_dest_runway("34R") == "34R"
    assert classify_dest_runway("runway 34R") == "34R"
    assert classify_dest_runway("runway 08 right") == "08R"
    assert classify_dest_runway("runway 8 right") == "08R"
    assert classify_dest_runway("runway 34") == "34"
    assert classify_dest_runway("holding point C5") is None
    assert classify_dest_runway("") is None
    assert classify_dest_runway(None) is None


def test_build_info_table_paper_row(rules, haneda_graph):
    utt = Utterance(time="17:45:11", text="JA722A, Tokyo Tower, good evening, number 1, taxi to holding point C5.")
    result = build_info_table([utt], rules, graph=haneda_graph)
    assert result.skipped == []
    row = result.rows[0]
    assert row.time == "17:45:11"
    assert row.callsign == "JA722A"
    assert row.ac_state == ["taxi"]
    assert row.dest_runway is None
    assert row.destination_raw == "holding point C5"
    assert row.destination_node == "Txy_C5_C5B"
    assert row.destination_display == "holding point C5(Txy_C5_C5B)"


def test_build_info_table_empty():
    from taxisentinel import compile_ruleset

    result = build_info_table([], compile_ruleset())
    assert result.rows == [] and result.skipped == []


def test_build_info_table_readback_two_callsigns(rules):
    utt = Utterance(time="0:05", text="Delta 295, give way to Endeavor 5526.")
    result = build_info_table([utt], rules)
    row = result.rows[0]
    assert row.callsign == "Delta 295"
    assert row.callsign_norm == "DAL295"
    assert row.remarks == ["Endeavor 5526"]


def test_build_info_table_skips_counted(rules):
    transcript = [
        Utterance(time="0:01", text="Wind check, 320 at 8."),
        Utterance(time="0:05", text="Delta 295, taxi."),
        Utterance(time="0:09", text="Say again?"),
    ]
    result = build_info_table(transcript, rules)
    assert len(result.rows) == 1
    assert len(result.skipped) == 2
    assert len(result.rows) + len(result.skipped) == len(transcript)
    assert [s["index"] for s in result.skipped] == [0, 2]


def test_build_info_table_requires_time_order(rules):
    transcript = [
        Utterance(time="0:10", text="Delta 295, taxi."),
        Utterance(time="0:05", text="Delta 295, hold."),
    ]
    with pytest.raises(MalformedFileError):
        build_info_table(transcript, rules)


def row(time_s, callsign, dest_runway=None):
    return InfoRow(time=str(time_s), time_s=time_s, callsign=callsign,
                   callsign_norm=callsign.upper().replace(" ", ""), dest_runway=dest_runway)


def test_carry_forward_fills_from_prior():
    table = [row(1, "DAL295", "08R"), row(2, "DAL295")]
    filled = carry_forward(table)
    assert filled[1].dest_runway == "08R"


def test_carry_forward_never_overwrites():
    table = [row(1, "DAL295", "08R"), row(2, "DAL295", "09L")]
    filled = carry_forward(table)
    assert [r.dest_runway for r in filled] == ["08R", "09L"]


def test_carry_forward_single_row_unchanged():
    table = [row(1, "DAL295")]
    assert carry_forward(table)[0].dest_runway is None


def test_carry_forward_does_not_cross_callsigns():
    table = [row(1, "DAL295", "08R"), row(2, "EDV5526"), row(3, "DAL295")]
    filled = carry_forward(table)
    assert filled[1].dest_runway is None
    assert filled[2].dest_runway == "08R"


def test_carry_forward_idempotent():
    table = [row(1, "DAL295", "08R"), row(2, "DAL295"), row(3, "EDV5526", "27"), row(4, "EDV5526")]
    once = carry_forward(table)
    twice = carry_forward(once)
    assert once == twice


def test_time_order_preserved(rules):
    transcript = [
        Utterance(time="0:01", text="Delta 295, taxi."),
        Utterance(time="0:05", text="Endeavor 5526, hold."),
        Utterance(time="0:09", text="Delta 295, continue."),
    ]
    result = build_info_table(transcript, rules)
    times = [r.time_s for r in result.rows]
    assert times == sorted(times)
