import pytest

from tailkit.bench import (
    CSV_HEADER,
    BenchRecord,
    bench_bimodal,
    bench_compare,
    parse_report,
)
from tailkit.generators import random_mealy
from tailkit.machines import MachineError
from tailkit.minimize import minimize_tail


def test_csv_header_schema():
    assert CSV_HEADER == (
        "method,n_states,seed,wall_ms,result_states,sat_calls,skipped_encoding,status"
    )


def test_record_row_round_trip():
    records = [
        BenchRecord("proposed", 12, 3, 4, 12, 0, True, "ok"),
        BenchRecord("naive", 12, 3, 600000, None, 10, False, "timeout"),
        BenchRecord("naive", 4, 0, 917, 3, 4, False, "ok"),
    ]
    text = CSV_HEADER + "\n" + "\n".join(r.csv_row() for r in records) + "\n"
    assert parse_report(text) == records


def test_record_validation():
    with pytest.raises(MachineError, match="method"):
        BenchRecord("clever", 4, 0, 1, 4, 0, False, "ok")
    with pytest.raises(MachineError, match="status"):
        BenchRecord("naive", 4, 0, 1, 4, 0, False, "crashed")
    with pytest.raises(MachineError, match="sat_calls"):
        BenchRecord("proposed", 4, 0, 1, 4, 2, True, "ok")
    with pytest.raises(MachineError, match="result_states"):
        BenchRecord("proposed", 4, 0, 1, None, 2, False, "ok")


def test_parse_report_rejects_garbage():
    with pytest.raises(MachineError, match="header"):
        parse_report("nope\n")
    with pytest.raises(MachineError, match="header"):
        parse_report("")
    with pytest.raises(MachineError, match="row"):
        parse_report(CSV_HEADER + "\nproposed,1,2\n")


def test_compare_rejects_empty_axes():
    with pytest.raises(MachineError):
        bench_compare([], [0])
    with pytest.raises(MachineError):
        bench_compare([2], [])


def test_compare_small_instances():
    text = bench_compare([2, 3], [0, 1], in_out_size=2, timeout=60.0)
    records = parse_report(text)
    assert len(records) == 8
    keys = [(r.n_states, r.seed, r.method) for r in records]
    assert keys == sorted(keys)
    by_instance = {}
    for r in records:
        assert r.status == "ok"
        assert r.sat_calls >= (0 if r.skipped_encoding else 1)
        by_instance.setdefault((r.n_states, r.seed), {})[r.method] = r
    for (size, seed), pair in by_instance.items():
        assert set(pair) == {"naive", "proposed"}
        # both methods must land on the same minimal size
        assert pair["naive"].result_states == pair["proposed"].result_states
        assert pair["proposed"].result_states <= size


def test_rows_reproduce_from_seed():
    text = bench_compare([3], [5], in_out_size=2, timeout=60.0)
    row = next(r for r in parse_report(text) if r.method == "proposed")
    h = random_mealy(row.n_states, 2, 2, 2 * row.seed)
    t = random_mealy(row.n_states, 2, 2, 2 * row.seed + 1)
    assert len(minimize_tail(h, t).states) == row.result_states


def test_compare_timeout_row():
    # at this size the naive size sweep cannot finish inside the budget,
    # while the covering method skips the encoding outright
    text = bench_compare([12], [0], in_out_size=4, timeout=0.2)
    records = parse_report(text)
    naive = next(r for r in records if r.method == "naive")
    proposed = next(r for r in records if r.method == "proposed")
    assert naive.status == "timeout"
    assert naive.result_states is None
    assert naive.wall_ms == 200
    assert proposed.status == "ok"
    assert proposed.skipped_encoding
    assert proposed.result_states == 12


def test_bimodal_small_instances():
    text = bench_bimodal(6, (1, 2), 5, in_out_size=2)
    records = parse_report(text)
    again = parse_report(bench_bimodal(6, (1, 2), 5, in_out_size=2))
    # wall time varies between runs; everything else is seed-determined
    strip = lambda r: (r.method, r.n_states, r.seed, r.result_states,
                       r.sat_calls, r.skipped_encoding, r.status)
    assert [strip(r) for r in again] == [strip(r) for r in records]
    assert len(records) == 6
    for r in records:
        assert r.method == "proposed"
        assert r.status == "ok"
        assert 1 <= r.n_states <= 2
        if r.skipped_encoding:
            assert r.sat_calls == 0
            assert r.result_states == r.n_states


def test_bimodal_validation():
    with pytest.raises(MachineError):
        bench_bimodal(0, (1, 2), 1)
    with pytest.raises(MachineError):
        bench_bimodal(3, (0, 2), 1)
    with pytest.raises(MachineError):
        bench_bimodal(3, (4, 2), 1)
