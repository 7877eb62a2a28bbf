import json

import numpy as np
import pytest

from superpack import family
from superpack.certifier import (
    MAX_DEPTH,
    CertificateChain,
    GapError,
    RowFailure,
    ScheduleEntry,
    _df_interval,
    _f_interval,
    _p_interval,
    appendix_schedule,
    auto_schedule,
    certificate_lines,
    certify_schedule,
    check_chain,
    infeasibility_witness,
    passing_coverage,
    read_certificate,
    read_schedule,
    region_check,
    verify_row,
    write_certificate,
    write_schedule,
)
from superpack.interval import Interval, IntervalMatrix3, abs_val, linf_op_norm
from superpack.reference import ENDPOINT_ROW, PRINTED_SCHEDULE_ROWS

WORKED = (1.0, 0.333333333333, 0.166666666667, 0.5, 0.03, 0.01)
# printed enclosures of the worked example
PRINTED_LHS_HI = 0.035585437892437462
PRINTED_RHS_LO = 0.60895579575438163
# rows whose hypothesis fails for the Jacobian-inverse T (see test below)
INFEASIBLE = [1.47, 1.48, 1.49, 1.5, 1.51, 1.575, 1.576, 1.577, 1.578, 1.579]


@pytest.fixture(scope="module")
def schedule():
    return appendix_schedule()


@pytest.fixture(scope="module")
def auto_full():
    return auto_schedule(1.0, 1.58, 0.01)


# region --------------------------------------------------------------------


def test_region_examples():
    assert region_check((1 / 3, 1 / 6, 1 / 2), 0.03)
    assert not region_check((0.498433446144, 0.477421354522, 0.519705097786), 0.03)
    for eps in (1e-300, 1e-12, 1e-3, 0.1):
        assert not region_check((0.5, 0.5, 0.5), eps)
    with pytest.raises(ValueError):
        region_check((0.4, 0.3, 0.6), 0)


# rows ------------------------------------------------------------------------


def test_worked_example():
    r = verify_row(*WORKED)
    assert r.passed and r.status == "pass" and r.region_ok
    assert r.lhs.hi < r.rhs.lo
    assert r.lhs.hi <= 0.05 and r.rhs.lo >= 0.5
    assert r.p_lo == 1.0 and r.p_hi >= 1.01 and r.margin > 0


def test_published_brackets_use_first_component():
    # The published numbers come from taking the first row (resp. component)
    # where a rigorous max was intended; evaluated that way over the whole
    # box they are reproduced.  Our enclosure of the true max is larger.
    p0, x0, y0, z0, eps, peps = WORKED
    P = _p_interval(p0, peps)
    X, Y, Z = (Interval.around(c, eps) for c in (x0, y0, z0))
    T = np.linalg.inv(family.family_jacobian(p0, x0, y0, z0))
    Ti = IntervalMatrix3.from_points(T)
    M = _df_interval(P, X, Y, Z) @ Ti - IntervalMatrix3.identity()
    row0 = abs_val(M[0, 0]) + abs_val(M[0, 1]) + abs_val(M[0, 2])
    f = _f_interval(P, *(Interval.point(c) for c in (x0, y0, z0)))
    rhs0 = 1 - linf_op_norm(Ti) * abs_val(f[0]) / eps
    assert row0.hi == pytest.approx(PRINTED_LHS_HI, rel=1e-12)
    assert rhs0.lo == pytest.approx(PRINTED_RHS_LO, rel=1e-12)
    r = verify_row(*WORKED)
    assert r.lhs.hi > PRINTED_LHS_HI and r.rhs.lo < PRINTED_RHS_LO


def test_point_samples_inside_interval_evaluation():
    p0, x0, y0, z0, eps, peps = WORKED
    P = _p_interval(1.2, 0.01)
    c = family.family_point(1.2).xyz
    box = [Interval.around(v, eps) for v in c]
    F = _f_interval(P, *box)
    D = _df_interval(P, *box)
    rng = np.random.default_rng(8)
    for _ in range(100):
        p = rng.uniform(P.lo, P.hi)
        x = [rng.uniform(b.lo, b.hi) for b in box]
        fv = family.family_system(p, *x)
        Jv = family.family_jacobian(p, *x)
        assert all(F[i].contains(fv[i]) for i in range(3))
        assert D.contains(Jv)


def test_region_failure_row():
    r = verify_row(1.579, 0.498433446144, 0.477421354522, 0.519705097786, 0.03, 0.001)
    assert not r.passed and not r.region_ok and r.status == "region"


def test_singular_T_row(monkeypatch):
    monkeypatch.setattr(family, "family_jacobian", lambda p, x, y, z: np.ones((3, 3)))
    r = verify_row(*WORKED)
    assert r.status == "singular-T" and not r.passed and r.region_ok


def test_row_argument_checks():
    with pytest.raises(ValueError):
        verify_row(1, 1 / 3, 1 / 6, 1 / 2, 0.03, 0)


def test_T_perturbation_keeps_verdict(schedule):
    rng = np.random.default_rng(4)
    for e in schedule[::9]:
        base = verify_row(e.p0, *e.center, e.eps, e.peps)
        if base.margin is None or abs(base.margin) <= 1e-6:
            continue
        T = base.T * (1 + 1e-10 * rng.standard_normal((3, 3)))
        assert verify_row(e.p0, *e.center, e.eps, e.peps, T=T).passed == base.passed


def test_passing_rows_contain_a_family_point(schedule):
    for e in schedule[::7]:
        r = verify_row(e.p0, *e.center, e.eps, e.peps)
        if not r.passed:
            continue
        pt = family.solve_family(0.5 * (r.p_lo + r.p_hi), e.center)
        assert max(abs(a - b) for a, b in zip(pt.xyz, e.center)) < e.eps


def test_zero_depth_is_coarser():
    a = verify_row(*WORKED, max_depth=0)
    b = verify_row(*WORKED)
    assert b.lhs.hi <= a.lhs.hi


# schedules ---------------------------------------------------------------------


def test_appendix_schedule_shape(schedule):
    assert len(schedule) == 52 + 60
    assert schedule[0] == ScheduleEntry(*PRINTED_SCHEDULE_ROWS[0])
    assert schedule[51].p0 == 1.51 and schedule[52].p0 == 1.52
    assert (schedule[51].eps, schedule[52].eps) == (0.03, 0.006)


def test_regenerated_centers_match_printed():
    printed = {r[0]: r for r in PRINTED_SCHEDULE_ROWS}
    pts = family.continue_family(sorted(printed))
    for pt in pts:
        row = printed[pt.p]
        assert max(abs(a - b) for a, b in zip(pt.xyz, row[1:4])) <= 1e-9


def test_single_row_chain():
    chain = certify_schedule([WORKED])
    assert isinstance(chain, CertificateChain)
    assert chain.covered[0] == 1.0 and chain.covered[1] == pytest.approx(1.01, abs=1e-15)
    assert chain.all_pass and chain.covers(1.0, 1.01)


def test_removed_row_reports_gap(schedule):
    good = [e for e in schedule if e.p0 <= 1.46]
    certify_schedule(good)
    holed = good[:20] + good[21:]
    with pytest.raises(GapError) as exc:
        certify_schedule(holed)
    assert exc.value.p == pytest.approx(1.2, abs=1e-12)
    assert exc.value.index == 20


def test_failing_row_reports_index(schedule):
    with pytest.raises(RowFailure) as exc:
        certify_schedule(schedule)
    assert exc.value.index == 47 and exc.value.status == "fail"
    assert len(exc.value.rows) == len(schedule)
    assert passing_coverage(exc.value.rows) == (1.0, pytest.approx(1.47, abs=1e-12))


def test_unsorted_schedule_rejected():
    with pytest.raises(ValueError):
        certify_schedule([PRINTED_SCHEDULE_ROWS[1], PRINTED_SCHEDULE_ROWS[0]])


def test_check_chain_empty():
    with pytest.raises(Exception):
        check_chain([])


def test_infeasible_rows_have_witnesses(schedule):
    # A witness is a single p and box corner where the lower bound of the
    # left side exceeds the upper bound of the right side: no enclosure,
    # however sharp, can make these rows pass with this T.
    rows = [e for e in schedule if e.p0 in INFEASIBLE] + [ScheduleEntry(*ENDPOINT_ROW)]
    assert len(rows) == 11
    for e in rows:
        w = infeasibility_witness(e.p0, *e.center, e.eps, e.peps)
        assert w is not None and w.gap > 0
        assert e.p0 <= w.p <= e.p0 + e.peps
        # corners are center +- eps rounded to nearest
        assert max(abs(a - b) for a, b in zip(w.x, e.center)) <= e.eps + 1e-15


def test_no_witness_for_passing_rows(schedule):
    for e in schedule[:40:5]:
        assert infeasibility_witness(e.p0, *e.center, e.eps, e.peps) is None


# auto schedule -------------------------------------------------------------


def test_auto_single_row():
    res = auto_schedule(1.0, 1.01, 0.01)
    assert res.complete and len(res.entries) == 1
    e = res.entries[0]
    assert (e.p0, e.eps, e.peps) == (1.0, 0.03, 0.01)
    assert res.rows[0].passed


def test_auto_full_range(auto_full):
    assert auto_full.complete and len(auto_full.entries) <= 200
    chain = certify_schedule(auto_full.entries)
    assert chain.covers(1.0, 1.58) and chain.all_pass
    assert len(chain.rows) == len(auto_full.entries)


def test_auto_beyond_needs_flag():
    with pytest.raises(ValueError):
        auto_schedule(1.58, 1.5849625, 0.001)


@pytest.mark.slow
def test_auto_beyond_reports_reach():
    res = auto_schedule(1.58, 1.5849625, 0.001, allow_beyond=True)
    assert not res.complete
    assert 1.58 <= res.reached < 1.5849625
    if res.rows:
        assert check_chain(res.rows) == (1.58, res.reached)


# files -------------------------------------------------------------------------


def test_schedule_round_trip(tmp_path, auto_full):
    f = tmp_path / "s.csv"
    write_schedule(auto_full.entries, f)
    assert f.read_text().splitlines()[0] == "p0,x0,y0,z0,eps,peps"
    assert read_schedule(f) == auto_full.entries


def test_schedule_read_errors(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("1,2,3\n")
    with pytest.raises(ValueError, match="line 1"):
        read_schedule(f)
    f.write_text("p0,x0,y0,z0,eps,peps\n# comment\n1,0.3,0.1,0.5,0.01,x\n")
    with pytest.raises(ValueError, match="line 3"):
        read_schedule(f)


def test_certificate_file(tmp_path):
    rows = [verify_row(*WORKED), verify_row(*PRINTED_SCHEDULE_ROWS[1])]
    f = tmp_path / "c.jsonl"
    write_certificate(rows, f)
    recs, summary = read_certificate(f)
    assert len(recs) == 2 and summary["rows"] == 2 and summary["all_pass"]
    assert summary["covered"][0] == 1.0
    keys = {"p_lo", "p_hi", "center", "eps", "T", "lhs", "rhs", "region_ok", "pass"}
    assert keys <= set(recs[0])
    assert len(recs[0]["T"]) == 9 and recs[0]["lhs"][1] == rows[0].lhs.hi
    assert json.loads(certificate_lines([])[-1]) == {"covered": None, "rows": 0, "all_pass": False}


def test_default_depth():
    assert MAX_DEPTH >= 12
