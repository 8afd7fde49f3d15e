import random

import pytest

from cognilog.boolmat import (
    BoolMatrix,
    adjacency,
    causal_closure,
    causal_closure_with_stats,
    check_causal_equations,
    conversion_pair,
    dump_matrices,
    evaluate_conversion,
)
from cognilog.errors import DimensionMismatchError, NotTriangularError
from cognilog.model import Action, Participant, build_elog

from conftest import load_log, random_elog


def _random_dag_matrix(rng, n):
    ids = tuple(f"v{i}" for i in range(n))
    m = BoolMatrix.zeros(ids, ids)
    for i in range(n):
        for j in range(i):
            if rng.random() < 0.35:
                m.set(i, j)  # strictly lower triangular: edge i -> j
    return m


def _dfs_reachability(m):
    n = len(m.row_ids)
    adj = {i: [j for j in range(n) if m.get(i, j)] for i in range(n)}
    reach = BoolMatrix.zeros(m.row_ids, m.col_ids)
    for start in range(n):
        stack = list(adj[start])
        seen = set()
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            reach.set(start, v)
            stack.extend(adj[v])
    return reach


def test_boolean_semiring_idempotence():
    rng = random.Random(3)
    m = _random_dag_matrix(rng, 6)
    assert (m | m) == m
    c = causal_closure(m)
    assert causal_closure(c, allow_cycles=True) == c


def test_closure_equals_dfs_oracle():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(1, 8)
        m = _random_dag_matrix(rng, n)
        closure, iterations = causal_closure_with_stats(m)
        assert closure == _dfs_reachability(m)
        assert iterations <= max(n - 1, 0)


def test_closure_rejects_cycles_unless_allowed():
    m = BoolMatrix.zeros(("a", "b"), ("a", "b"))
    m.set(0, 1)
    m.set(1, 0)
    with pytest.raises(NotTriangularError):
        causal_closure(m)
    c = causal_closure(m, allow_cycles=True)
    assert c.get(0, 0) and c.get(1, 1)


def test_closure_requires_square():
    with pytest.raises(DimensionMismatchError):
        causal_closure(BoolMatrix.zeros(("a",), ("a", "b")))


def test_matmul_and_transpose():
    m = BoolMatrix.zeros(("r0", "r1"), ("c0", "c1", "c2"))
    m.set(0, 2)
    m.set(1, 0)
    t = m.transpose()
    assert t.get(2, 0) and t.get(0, 1)
    ident = BoolMatrix.identity(("c0", "c1", "c2"))
    assert (m @ ident) == m


def test_bob_alice_adjacency():
    log = load_log("bob_alice.elog")
    m = adjacency(log)
    assert m.S_tri.entry_ids() == [("is_loved", "loves")]
    assert m.N_tri.entry_ids() == [("loves", "is_loved")]
    assert m.S.entry_ids() == [("is_loved", "loves")]
    assert m.N.entry_ids() == [("loves", "is_loved")]
    assert ("Bob", "loves") in m.E.entry_ids()
    assert ("Alice", "is_loved") in m.E.entry_ids()


def test_adjacency_strictly_triangular():
    rng = random.Random(17)
    for _ in range(40):
        m = adjacency(random_elog(rng))
        ns = len(m.action_ids) - 2  # sentinels trail the order
        for i in range(ns):
            for j in range(i, ns):
                assert not m.S.get(i, j)  # S strictly lower
            for j in range(0, i + 1):
                assert not m.N.get(i, j)  # N strictly upper


def test_identity_functor_is_complete():
    rng = random.Random(23)
    for _ in range(25):
        log = random_elog(rng)
        m = adjacency(log)
        amap = {a.id: a.id for a in log.nonsentinel_actions}
        pmap = {p.id: p.id for p in log.nonsentinel_participants}
        report = evaluate_conversion(m, m, amap, pmap)
        assert report.complete, report


def test_causal_equation_swap_symmetry():
    # swapping (S, N_tri) with (N, S_tri) on both sides swaps the two flags
    rng = random.Random(29)
    for _ in range(20):
        e = random_elog(rng, log_id="e")
        s = random_elog(rng, slog=True, log_id="s")
        e_m, s_m = adjacency(e), adjacency(s)
        amap = {
            a.id: rng.choice(s_m.action_ids[:-2])
            for a in e.nonsentinel_actions
        }
        p = conversion_pair(e_m, s_m, amap, {})
        ok_s, ok_n, _ = check_causal_equations(e_m, s_m, p)
        e_m.S, e_m.N = e_m.N, e_m.S
        e_m.S_tri, e_m.N_tri = e_m.N_tri, e_m.S_tri
        s_m.S, s_m.N = s_m.N, s_m.S
        s_m.S_tri, s_m.N_tri = s_m.N_tri, s_m.S_tri
        ok_s2, ok_n2, _ = check_causal_equations(e_m, s_m, p)
        assert (ok_s, ok_n) == (ok_n2, ok_s2)


def test_who_equation_detects_swapped_performers():
    e = build_elog(
        "e",
        (Action(id="acts", who="Bob"),),
        (Participant(id="Bob"), Participant(id="Pat")),
    )
    s = build_elog(
        "s",
        (Action(id="does", who="agent"),),
        (Participant(id="agent"), Participant(id="patient")),
    )
    good = evaluate_conversion(
        adjacency(e), adjacency(s), {"acts": "does"}, {"Bob": "agent"}
    )
    assert good.who_eq_ok
    bad = evaluate_conversion(
        adjacency(e), adjacency(s), {"acts": "does"}, {"Bob": "patient"}
    )
    assert not bad.who_eq_ok
    assert bad.who_mismatches


def test_zero_column_rule():
    e = build_elog(
        "e",
        (Action(id="a0", who="p0"),),
        (Participant(id="p0"),),
    )
    s = build_elog(
        "s",
        (Action(id="s0", who="q0"),),
        (Participant(id="q0"),),
    )
    # action mapped but its performer left unmapped: zero-column violation
    report = evaluate_conversion(adjacency(e), adjacency(s), {"a0": "s0"}, {})
    assert not report.zero_column_rule_ok


def test_dump_matrices_shape():
    text = dump_matrices(load_log("bob_alice.elog"))
    lines = text.splitlines()
    assert lines[0] == "M S 4x4"
    assert "M E 3x4" in lines
    assert text.endswith("\n")
