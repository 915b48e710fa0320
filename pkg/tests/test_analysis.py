import itertools
import math
import random

import numpy as np
import pytest

from gramlab.analysis import (
    CURVE_HEADER,
    FIT_HEADER,
    RECORD_HEADER,
    AuditReport,
    Check,
    CurvePoint,
    ExperimentRecord,
    FitRecord,
    audit_inequalities,
    excess_sequence,
    h_u_curve,
    longest_repeat,
    plugin_block_entropy,
    powerlaw_fit,
    read_csv,
    s_stat,
    t_stat,
    write_csv,
)
from gramlab.coder import IntCode
from gramlab.grammar import Grammar
from gramlab.processes import SantaFeParams, analytic_entropy_curves, expected_distinct, sample_ternary, u_card_exact
from gramlab.transforms import Objective, greedy_transform


def brute_longest_repeat(w):
    n = len(w)
    for L in range(n - 1, 0, -1):
        seen = set()
        for i in range(n - L + 1):
            t = tuple(w[i:i + L])
            if t in seen:
                return L
            seen.add(t)
    return 0


def test_longest_repeat_examples():
    assert longest_repeat(b"abab") == 2
    assert longest_repeat(b"aaa") == 2
    assert longest_repeat(b"abc") == 0
    assert longest_repeat(b"") == 0


def test_longest_repeat_exhaustive_binary():
    for L in range(13):
        for w in itertools.product([0, 1], repeat=L):
            assert longest_repeat(w) == brute_longest_repeat(w)


def test_longest_repeat_random_longer():
    rng = random.Random(50)
    for _ in range(10_000):
        a = rng.randint(2, 4)
        w = [rng.randrange(a) for _ in range(rng.randint(13, 64))]
        assert longest_repeat(w) == brute_longest_repeat(w)


def test_excess_sequence_linear_and_power():
    ns = [1, 2, 5, 10, 100, 1000, 10**5]
    F = excess_sequence(lambda n: 3.7 * n, ns)
    assert all(v == 0 for v in F.values())
    P = excess_sequence(lambda n: n**0.8, ns)
    for n in ns:
        assert P[n] > 0
        assert P[n] == pytest.approx((2 - 2**0.8) * n**0.8, rel=1e-12)


def test_excess_sequence_mapping():
    G = {1: 1.0, 2: 1.5, 4: 2.0}
    assert excess_sequence(G, [1, 2]) == {1: 0.5, 2: 1.0}
    with pytest.raises(KeyError):
        excess_sequence(G, [4])


def test_excess_sequence_of_analytic_block_entropy():
    params = SantaFeParams(0.8)
    ns = [10, 100, 1000]
    H = {}
    for n in ns + [2 * n for n in ns]:
        H[n] = analytic_entropy_curves(params, n)[0]
    F = excess_sequence(H, ns)
    for n in ns:
        want = math.log(2) * (2 * expected_distinct(n, params) - expected_distinct(2 * n, params))
        assert F[n] == pytest.approx(want, rel=1e-9)


def test_powerlaw_fit_exact():
    ns = [10, 100, 1000, 10**4]
    f = powerlaw_fit(ns, [3 * n**0.8 for n in ns])
    assert f.exponent == pytest.approx(0.8, abs=1e-9)
    assert math.exp(f.intercept) == pytest.approx(3.0)
    assert f.r_squared == pytest.approx(1.0)
    c = powerlaw_fit([(n, 5.0) for n in ns])
    assert c.exponent == pytest.approx(0.0, abs=1e-9) and c.r_squared == 1.0
    assert (f.n_min, f.n_max) == (10, 10**4)
    assert f.predict(50) == pytest.approx(3 * 50**0.8)


def test_powerlaw_fit_errors():
    with pytest.raises(ValueError):
        powerlaw_fit([10, 100], [1, 2])
    with pytest.raises(ValueError):
        powerlaw_fit([10, 100, 1000], [1, 0, 2])
    with pytest.raises(ValueError):
        powerlaw_fit([1, 10, 100], [1, 2, 3])
    with pytest.raises(ValueError):
        powerlaw_fit([10, 10, 10], [1, 2, 3])


def test_powerlaw_fit_on_u_card():
    params = SantaFeParams(0.8)
    ns = sorted({int(round(x)) for x in np.logspace(2, 6, 17)})
    f = powerlaw_fit(ns, [u_card_exact(n, 0.75, params) for n in ns])
    assert abs(f.exponent - 0.8) <= 0.03
    assert 0 <= f.r_squared <= 1


def test_plugin_entropy_known_cases():
    rng = np.random.default_rng(51)
    bits = rng.integers(0, 2, 200_000)
    assert plugin_block_entropy([bits], 1) == pytest.approx(math.log(2), abs=0.01)
    assert plugin_block_entropy([np.zeros(20_000, dtype=int)], 3) == 0.0
    assert plugin_block_entropy(["0120" * 5000], 1) == pytest.approx(-(0.5 * math.log(0.5) + 2 * 0.25 * math.log(0.25)))


def test_plugin_entropy_guards():
    with pytest.raises(ValueError):
        plugin_block_entropy([np.zeros(100_000, dtype=int)], 5)
    with pytest.raises(ValueError):
        plugin_block_entropy([np.zeros(100, dtype=int)], 1)


def test_plugin_entropy_of_ternary_samples_is_concave_nondecreasing():
    samples = [sample_ternary(SantaFeParams(0.8, s), 20_000).symbols for s in range(4)]
    H = [0.0] + [plugin_block_entropy(samples, m) for m in (1, 2, 3)]
    d = np.diff(H)
    assert np.all(d >= 0)
    assert np.all(np.diff(d) <= 1e-12)


def test_h_u_curve():
    ns = [10, 100]
    assert h_u_curve(ns, 0.3, 0.5, [4, 9]).tolist() == pytest.approx([3.0, 30.0])
    v = h_u_curve(ns, 0.3, 0.75, [4, 9])
    assert v[0] == pytest.approx(3.0 + (math.log(2) - 0.562335) * 4, abs=1e-5)


def test_audit_report_api():
    r = AuditReport([Check("yk.lower", 0, 1), Check("yk.upper", 3, 2)])
    assert not r.ok
    assert [c.name for c in r.violations()] == ["yk.upper"]
    assert r["yk.lower"].slack == 1
    assert r.select("yk.l").ok
    with pytest.raises(KeyError):
        r["nope"]


def test_audit_on_single_rule_grammars():
    u, v = [0, 1], [1, 0]
    G = lambda w: Grammar([w], 2)  # noqa: E731
    rep = audit_inequalities(u, v, G(u), G(v), G(u + v), code=IntCode(3), strict=True)
    assert rep.ok
    assert {c.name for c in rep.checks} == {
        "yk.lower", "yk.upper", "code.i.u", "code.i.v", "code.ii.excess", "code.ii.secondary", "code.iii",
    }
    assert {c.name for c in audit_inequalities(u, v, G(u), G(v), G(u + v)).checks} == {"yk.lower", "yk.upper"}


def test_audit_strict_raises_on_violation():
    u = v = [0, 1, 0, 1]
    bad = Grammar([[0, 1, 0, 1, 0, 1, 0, 1, 0]], 2)  # not even a grammar for uv
    with pytest.raises(AssertionError):
        audit_inequalities(u, v, Grammar([[]], 2), Grammar([[]], 2), bad, strict=True)


def test_audit_reports_greedy_violation_rate():
    rng = random.Random(52)
    obj = Objective.code_length(2)
    total = bad = 0
    for _ in range(60):
        w = [rng.randrange(2) for _ in range(rng.randint(4, 40))]
        p = rng.randint(1, len(w) - 1)
        u, v = w[:p], w[p:]
        rep = audit_inequalities(u, v, greedy_transform(u, 2, obj), greedy_transform(v, 2, obj),
                                 greedy_transform(w, 2, obj), code=IntCode(2))
        total += len(rep.checks)
        bad += len(rep.violations())
    assert 0 <= bad / total <= 1  # reported, not asserted


def test_statistics():
    assert s_stat(10, 1, 0.8) is None and t_stat(3, 1) is None
    assert s_stat(10, 100, 0.8) == pytest.approx(10 * 100**-0.8 * math.log(100))
    assert t_stat(3, 100) == pytest.approx(4 / math.log(100))


def test_csv_headers():
    assert RECORD_HEADER == "experiment,beta,delta,n,seed,voc,code_digits,longest_repeat,u_card,s_n,t_n"
    assert FIT_HEADER == "experiment,quantity,exponent,intercept,r2,n_min,n_max"
    assert CURVE_HEADER == "experiment,quantity,n,value"


def test_csv_round_trip(tmp_path):
    recs = [
        ExperimentRecord("ucard", 0.8, 0.75, 100, None, u_card=9),
        ExperimentRecord("x", 0.1 + 0.2, None, 5, 3, 4, 17, 2, None, s_stat(4, 5, 0.1), t_stat(2, 5)),
    ]
    p = tmp_path / "r.csv"
    write_csv(p, recs)
    assert p.read_text().splitlines()[0] == RECORD_HEADER
    assert read_csv(p) == recs
    fits = [FitRecord("a", "b", 0.8000000000000002, -1.5, 1.0, 10.0, 1e6)]
    write_csv(tmp_path / "f.csv", fits)
    assert read_csv(tmp_path / "f.csv", FitRecord) == fits
    curves = [CurvePoint("a", "q", 10.0, 1 / 3)]
    write_csv(tmp_path / "c.csv", curves)
    assert read_csv(tmp_path / "c.csv", CurvePoint) == curves
    with pytest.raises(ValueError):
        read_csv(tmp_path / "c.csv", FitRecord)
    with pytest.raises(ValueError):
        write_csv(tmp_path / "e.csv", [])
