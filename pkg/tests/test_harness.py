import csv
import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from dnfrt.boolfn import Dnf, FactoredDnf, Term, reldist_exhaustive
from dnfrt.errors import CapExceeded, DegenerateSpec, DnfrtError
from dnfrt.harness.certify import certify_far, term_counts, term_of_index
from dnfrt.harness.experiment import (
    CSV_COLUMNS,
    ExperimentConfig,
    config_from_dict,
    report_paths,
    run_experiment,
)
from dnfrt.harness.instances import (
    InstanceSpec,
    WidthDist,
    far_random_density,
    far_xor,
    gen_random_dnf,
    load_instance,
    parse_instance_spec,
)
from dnfrt.harness.structural import (
    adequacy_gap,
    cube_density,
    dominating_function,
    is_attracted,
    is_dense,
    is_stable,
    stability,
)
from dnfrt.params import parameter_schedule

GOLDEN = Path(__file__).parent / "golden" / "report_schema.json"


# --- instances --------------------------------------------------------------


def test_full_width_single_term():
    f = gen_random_dnf(6, 1, WidthDist.fixed(6), np.random.default_rng(0))
    assert f.table().sum() == 1


def test_generated_terms_are_satisfiable():
    rng = np.random.default_rng(1)
    for _ in range(50):
        f = gen_random_dnf(10, 4, WidthDist.uniform(1, 6), rng, active=8)
        for t in f.terms:
            assert t.table(10).any()
        assert len({abs(l) for t in f.terms for l in t.lits}) <= 8


def test_min_width_law():
    wd = WidthDist.uniform(1, 5)
    s = 3
    rng = np.random.default_rng(2)
    mins = [min(t.width for t in gen_random_dnf(12, s, wd, rng).terms) for _ in range(1000)]
    for w in range(1, 5):
        emp = np.mean(np.asarray(mins) <= w)
        exact = wd.min_cdf(w, s)
        assert abs(emp - exact) <= 4 * np.sqrt(exact * (1 - exact) / 1000) + 1e-9


def test_degenerate_specs():
    with pytest.raises(DegenerateSpec):
        gen_random_dnf(4, 1, WidthDist.fixed(5), np.random.default_rng(0))
    with pytest.raises(DegenerateSpec):
        gen_random_dnf(4, 0, WidthDist.fixed(1), np.random.default_rng(0))


def test_instance_spec_reproducible():
    spec = InstanceSpec("random_dnf", 10, s=2, wmin=1, wmax=3)
    assert spec.build(5).digest() == spec.build(5).digest()
    assert spec.build(5).digest() != spec.build(6).digest()
    pinned = InstanceSpec("far_xor", 8, head_width=2, seed=11)
    assert pinned.build(1).digest() == pinned.build(2).digest()
    assert spec.expect_yes and not pinned.expect_yes


def test_parse_instance_spec_and_files(tmp_path):
    spec = parse_instance_spec("far_random_density:n=8,density=0.3,seed=none")
    assert spec.kind == "far_random_density" and spec.density == 0.3 and spec.seed is None
    with pytest.raises(ValueError):
        parse_instance_spec("random_dnf:s=2")
    with pytest.raises(ValueError):
        parse_instance_spec("nope:n=3")
    p = tmp_path / "f.dnf"
    p.write_text("1 -2\n3\n")
    spec = parse_instance_spec(str(p))
    inst = spec.build()
    assert inst.n == 3 and inst.dnf.terms == (Term.of(1, -2), Term.of(3))
    assert spec.expect_yes is None
    q = tmp_path / "f.tt"
    q.write_text("n=2 tt=a\n")
    assert load_instance(str(q)).table.tolist() == [False, True, False, True]


def test_far_generators():
    rng = np.random.default_rng(0)
    tab = far_xor(8, 2, 3, rng)
    assert tab.sum() == 2 ** (8 - 2) // 2
    tab = far_random_density(8, 0.25, rng)
    assert tab.sum() == 64


# --- certify ----------------------------------------------------------------


def test_term_counts_match_direct():
    rng = np.random.default_rng(0)
    n = 4
    tab = rng.integers(2, size=16).astype(bool)
    a = term_counts(tab, n)
    for i in range(3**n):
        t = term_of_index(i, n)
        assert a[i] == int((t.table(n) & tab).sum())


def test_certify_examples():
    xor = np.array([0, 1, 1, 0], dtype=bool)
    cert = certify_far(xor, 2, 1, Fraction(1, 4))
    assert cert.reldist == Fraction(1, 2) and cert.far
    assert reldist_exhaustive(xor, cert.nearest, 2) == Fraction(1, 2)
    f = Dnf.from_lists([[1, -2], [3, 4]], 5)
    assert certify_far(f, 5, 2).reldist == 0
    with pytest.raises(CapExceeded):
        certify_far(np.ones(1 << 11, dtype=bool), 11, 2)


def test_certify_matches_naive_enumeration():
    rng = np.random.default_rng(1)
    n = 3
    terms = [term_of_index(i, n) for i in range(3**n)]
    tables = [t.table(n) for t in terms]
    for _ in range(20):
        f = rng.integers(2, size=8).astype(bool)
        if not f.any():
            continue
        best = min(reldist_exhaustive(f, a | b, n) for a in tables for b in tables)
        best = min(best, Fraction(1))  # the empty DNF
        assert certify_far(f, n, 2).reldist == best


def test_certify_monotone_in_s():
    rng = np.random.default_rng(2)
    for _ in range(100):
        f = far_random_density(5, float(rng.uniform(0.1, 0.6)), rng)
        d0, d1, d2 = (certify_far(f, 5, s).reldist for s in (0, 1, 2))
        assert d2 <= d1 <= d0 == 1


# --- structural -------------------------------------------------------------


def test_dense_and_attracted():
    f = Dnf.from_lists([[1, 2]], 4)
    assert is_dense(f, 0b0011, 0b0011, 4, 1)
    assert cube_density(f, 0b0011, 0b1111, 4) == 1
    assert cube_density(f, 0b0011, 0b0000, 4) == Fraction(1, 4)
    assert is_attracted(f, Term.of(1, 2), [0b0011], 4, Fraction(1, 2))


def test_stability_exact():
    h = FactoredDnf(Term.of(7, -8), (Term.of(1, 2), Term.of(-3)), 2, 3, 8)
    R = 0b0000_0111
    st = stability(h, R, 8)
    assert st.stable and st.mass_off == 0 and st.u == 0b0100_0000
    assert is_stable(h, R, Fraction(1, 16), 8)
    F = dominating_function(h, R, 8)
    assert F.tolist() == [bool((y & 3) == 3 or not (y & 4)) for y in range(8)]
    # R missing a tail variable: x2 is outside R, so its assignment is not pinned
    st2 = stability(h, 0b0000_0101, 8)
    assert st2.mass_off > 0


def test_adequacy_gap_small():
    spec = InstanceSpec("random_dnf", 10, s=1, wmin=1, wmax=3, active=6)
    inst = spec.build(0)
    params = parameter_schedule(1, "1/4")
    gap = adequacy_gap(inst.table, 10, 1, Fraction(1, 4), params, 10, 0, inst.dnf)
    assert gap.used == 10
    assert gap.ci_low <= gap.gap <= gap.ci_high
    with pytest.raises(ValueError):
        adequacy_gap(inst.table, 10, 1, Fraction(1, 4), params, 1, 0, None)


# --- experiment -------------------------------------------------------------


def small_cfg(trials=3, out=None, seed=7):
    spec = InstanceSpec("random_dnf", 10, s=2, wmin=1, wmax=4, active=6)
    return ExperimentConfig(spec, 2, Fraction(1, 4), "desk", {}, trials, seed, out)


def test_zero_trials_echo_config():
    res = run_experiment(small_cfg(trials=0))
    assert res.report["trials"] == []
    assert res.report["config"]["trials"] == 0
    assert res.report["summary"]["accept_rate"] == 0.0


def test_reports_are_reproducible_and_consistent(tmp_path):
    a = run_experiment(small_cfg(out=str(tmp_path / "a.json")))
    b = run_experiment(small_cfg(out=str(tmp_path / "b.json")))
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    summ = a.report["summary"]
    assert summ["total_queries"] == sum(r["mq_calls"] + r["samp_calls"] for r in a.report["trials"])
    assert summ["budget_violations"] == 0 and summ["tfd_bound_violations"] == 0
    with open(tmp_path / "a.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 4
    assert a.report["config_hash"] == b.report["config_hash"]
    del b


def test_parallel_matches_serial(monkeypatch):
    serial = run_experiment(small_cfg(trials=4)).json_text()
    monkeypatch.setenv("DNFRT_THREADS", "2")
    assert run_experiment(small_cfg(trials=4)).json_text() == serial


def test_config_round_trip_and_paths(tmp_path):
    cfg = small_cfg()
    back = config_from_dict(cfg.to_dict())
    assert back.config_hash() == cfg.config_hash()
    assert report_paths(tmp_path / "r.json") == (tmp_path / "r.json", tmp_path / "r.csv")
    assert report_paths(tmp_path) == (tmp_path / "report.json", tmp_path / "trials.csv")


def test_theory_mode_is_refused():
    cfg = small_cfg()
    cfg.mode = "theory"
    with pytest.raises(DnfrtError):
        run_experiment(cfg)


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(DnfrtError, match="cannot write"):
        run_experiment(small_cfg(trials=1, out=str(blocker / "sub" / "r.json")))


def schema(obj):
    if isinstance(obj, dict):
        return {k: schema(v) for k, v in sorted(obj.items())}
    if isinstance(obj, list):
        return [schema(obj[0])] if obj else []
    if isinstance(obj, bool) or obj is None:
        return type(obj).__name__
    if isinstance(obj, (int, float)):
        return "number"
    return type(obj).__name__


def test_report_schema_golden():
    report = run_experiment(small_cfg(trials=2, seed=1)).report
    got = schema(report)
    want = json.loads(GOLDEN.read_text())
    assert got == want
