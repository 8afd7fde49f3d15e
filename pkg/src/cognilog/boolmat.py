"""Boolean logical-matrix kernel for functor evaluation.

Matrices live over the Boolean semiring (1+1=1).  Rows are bit-packed into
Python ints, so OR/AND/matmul are word-parallel.  The cause matrices S and N
are strictly triangular under the canonical causal-topological order; their
Boolean power series (transitive closure) therefore terminates, and the
functor equations compare closures conjugated through the conversion
matrices P_S and P_E.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import DimensionMismatchError, NotTriangularError
from .model import (
    ELog,
    SENTINEL_ACTIONS,
    SENTINEL_NOBODY,
    canonical_action_order,
    canonical_participant_order,
)


@dataclass
class BoolMatrix:
    row_ids: tuple[str, ...]
    col_ids: tuple[str, ...]
    rows: list[int] = field(default_factory=list)  # bitmask per row, bit j = col j

    def __post_init__(self):
        if not self.rows:
            self.rows = [0] * len(self.row_ids)
        if len(self.rows) != len(self.row_ids):
            raise DimensionMismatchError("row count does not match row_ids")

    # -- construction ------------------------------------------------------
    @classmethod
    def zeros(cls, row_ids: Iterable[str], col_ids: Iterable[str]) -> "BoolMatrix":
        return cls(tuple(row_ids), tuple(col_ids))

    @classmethod
    def identity(cls, ids: Iterable[str]) -> "BoolMatrix":
        ids = tuple(ids)
        m = cls(ids, ids)
        for i in range(len(ids)):
            m.rows[i] |= 1 << i
        return m

    # -- element access ----------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_ids), len(self.col_ids)

    def get(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def set(self, i: int, j: int) -> None:
        self.rows[i] |= 1 << j

    def set_ids(self, row_id: str, col_id: str) -> None:
        self.set(self.row_ids.index(row_id), self.col_ids.index(col_id))

    def entries(self) -> Iterator[tuple[int, int]]:
        for i, bits in enumerate(self.rows):
            while bits:
                low = bits & -bits
                yield i, low.bit_length() - 1
                bits ^= low

    def entry_ids(self) -> list[tuple[str, str]]:
        return [(self.row_ids[i], self.col_ids[j]) for i, j in self.entries()]

    def count(self) -> int:
        return sum(bits.bit_count() for bits in self.rows)

    # -- algebra -----------------------------------------------------------
    def __or__(self, other: "BoolMatrix") -> "BoolMatrix":
        if self.shape != other.shape:
            raise DimensionMismatchError(f"OR of {self.shape} and {other.shape}")
        out = BoolMatrix(self.row_ids, self.col_ids)
        out.rows = [a | b for a, b in zip(self.rows, other.rows)]
        return out

    def __matmul__(self, other: "BoolMatrix") -> "BoolMatrix":
        if len(self.col_ids) != len(other.row_ids):
            raise DimensionMismatchError(
                f"matmul of {self.shape} and {other.shape}"
            )
        out = BoolMatrix(self.row_ids, other.col_ids)
        for i, bits in enumerate(self.rows):
            acc = 0
            while bits:
                low = bits & -bits
                acc |= other.rows[low.bit_length() - 1]
                bits ^= low
            out.rows[i] = acc
        return out

    def transpose(self) -> "BoolMatrix":
        out = BoolMatrix(self.col_ids, self.row_ids)
        for i, j in self.entries():
            out.rows[j] |= 1 << i
        return out

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, BoolMatrix)
            and self.row_ids == other.row_ids
            and self.col_ids == other.col_ids
            and self.rows == other.rows
        )

    def equals_on(self, other: "BoolMatrix", indices: Iterable[int]) -> bool:
        mask = 0
        idx = list(indices)
        for j in idx:
            mask |= 1 << j
        return all(
            (self.rows[i] & mask) == (other.rows[i] & mask) for i in idx
        )

    def column_mask(self, j: int) -> int:
        return sum((row >> j & 1) << i for i, row in enumerate(self.rows))

    def nonzero_rows(self) -> set[int]:
        return {i for i, bits in enumerate(self.rows) if bits}

    def nonzero_cols(self) -> set[int]:
        acc = 0
        for bits in self.rows:
            acc |= bits
        return {j for j in range(len(self.col_ids)) if acc >> j & 1}

    def dump(self, name: str) -> str:
        """Debug dump: header line plus one 0/1 string per row."""
        lines = [f"M {name} {len(self.row_ids)}x{len(self.col_ids)}"]
        for bits in self.rows:
            lines.append(
                "".join("1" if bits >> j & 1 else "0" for j in range(len(self.col_ids)))
            )
        return "\n".join(lines)


@dataclass
class CauseMatrices:
    """Adjacency view of one log under its canonical object orders."""

    action_ids: tuple[str, ...]
    participant_ids: tuple[str, ...]
    S: BoolMatrix
    N: BoolMatrix
    S_tri: BoolMatrix
    N_tri: BoolMatrix
    E: BoolMatrix  # participants x actions; E[p, a] = 1 iff who(a) = p


@dataclass
class ConversionPair:
    """Object maps of a functor in matrix form: rows are target (s-log)
    objects, columns are source (e-log) objects."""

    P_S: BoolMatrix
    P_E: BoolMatrix


@dataclass
class CompletenessReport:
    is_function: bool = True
    zero_column_rule_ok: bool = True
    surjective: bool = True
    injective: bool = True
    causal_eq_S_ok: bool = True
    causal_eq_N_ok: bool = True
    who_eq_ok: bool = True
    causal_mismatches: tuple[tuple[str, str], ...] = ()
    who_mismatches: tuple[tuple[str, str], ...] = ()
    # soft flag (not part of completeness): e-log trivial pairs land on
    # s-log trivial pairs or collapse to one action
    trivial_pairs_preserved: bool = True

    @property
    def complete(self) -> bool:
        return (
            self.is_function
            and self.zero_column_rule_ok
            and self.surjective
            and self.injective
            and self.causal_eq_S_ok
            and self.causal_eq_N_ok
            and self.who_eq_ok
        )

    def hard_checks(self) -> tuple[bool, bool, bool, bool]:
        return (
            self.zero_column_rule_ok,
            self.causal_eq_S_ok,
            self.causal_eq_N_ok,
            self.who_eq_ok,
        )


def adjacency(log: ELog) -> CauseMatrices:
    """Extract S/N/E matrices under the canonical orders.

    Sentinel and self arrows are excluded from S and N, which keeps both
    strictly triangular; sentinels occupy the trailing rows/columns.
    """
    a_ids = tuple(canonical_action_order(log))
    p_ids = tuple(canonical_participant_order(log))
    a_index = {aid: i for i, aid in enumerate(a_ids)}
    p_index = {pid: i for i, pid in enumerate(p_ids)}

    S = BoolMatrix.zeros(a_ids, a_ids)
    N = BoolMatrix.zeros(a_ids, a_ids)
    S_tri = BoolMatrix.zeros(a_ids, a_ids)
    N_tri = BoolMatrix.zeros(a_ids, a_ids)
    E = BoolMatrix.zeros(p_ids, a_ids)

    for a in log.actions:
        i = a_index[a.id]
        if a.who in p_index:
            E.rows[p_index[a.who]] |= 1 << i
        if (
            a.cause_s in a_index
            and a.cause_s not in SENTINEL_ACTIONS
            and a.cause_s != a.id
            and a.id not in SENTINEL_ACTIONS
        ):
            j = a_index[a.cause_s]
            S.set(i, j)
            if a.trivial_partner == a.cause_s:
                S_tri.set(i, j)
        if (
            a.cause_n in a_index
            and a.cause_n not in SENTINEL_ACTIONS
            and a.cause_n != a.id
            and a.id not in SENTINEL_ACTIONS
        ):
            j = a_index[a.cause_n]
            N.set(i, j)
            if a.trivial_partner == a.cause_n:
                N_tri.set(i, j)

    return CauseMatrices(a_ids, p_ids, S, N, S_tri, N_tri, E)


def causal_closure(m: BoolMatrix, allow_cycles: bool = False) -> BoolMatrix:
    closure, _ = causal_closure_with_stats(m, allow_cycles=allow_cycles)
    return closure


def causal_closure_with_stats(
    m: BoolMatrix, allow_cycles: bool = False
) -> tuple[BoolMatrix, int]:
    """Boolean power-series sum of m (paths of length >= 1) plus the number of
    productive squaring rounds.

    A strictly triangular matrix is nilpotent, so the series is finite; with
    ``allow_cycles`` the fixed point is still reached (Boolean monotonicity)
    and diagonal entries are tolerated, as needed for trivial-pair masks.
    """
    if m.row_ids != m.col_ids:
        raise DimensionMismatchError("closure requires a square matrix")
    n = len(m.row_ids)
    reach = BoolMatrix(m.row_ids, m.col_ids)
    reach.rows = list(m.rows)
    iterations = 0
    cap = max(n, 1)
    while True:
        nxt = reach | (reach @ reach)
        if nxt.rows == reach.rows:
            break
        reach = nxt
        iterations += 1
        if iterations > cap:  # unreachable; guards the invariant
            raise NotTriangularError("closure failed to reach a fixed point")
    if not allow_cycles and any(reach.get(i, i) for i in range(n)):
        bad = [m.row_ids[i] for i in range(n) if reach.get(i, i)]
        raise NotTriangularError(
            "cycle among non-sentinel actions: " + ", ".join(bad)
        )
    return reach, iterations


def conversion_pair(
    e: CauseMatrices,
    s: CauseMatrices,
    action_map: dict[str, str],
    participant_map: dict[str, str],
) -> ConversionPair:
    """Build P_S/P_E from object maps; sentinel images are forced."""
    P_S = BoolMatrix.zeros(s.action_ids, e.action_ids)
    P_E = BoolMatrix.zeros(s.participant_ids, e.participant_ids)
    full_amap = dict(action_map)
    for sid in SENTINEL_ACTIONS:
        full_amap.setdefault(sid, sid)
    full_pmap = dict(participant_map)
    full_pmap.setdefault(SENTINEL_NOBODY, SENTINEL_NOBODY)
    for src, dst in full_amap.items():
        P_S.set_ids(dst, src)
    for src, dst in full_pmap.items():
        P_E.set_ids(dst, src)
    return ConversionPair(P_S, P_E)


def _image_indices(p: BoolMatrix) -> set[int]:
    return p.nonzero_rows()


def check_causal_equations(
    e: CauseMatrices, s: CauseMatrices, p: ConversionPair
) -> tuple[bool, bool, tuple[tuple[str, str], ...]]:
    """Boolean functor equations for the cause structure.

    For each direction, both sides are the identity plus a closure: the s-log
    side closes its own cause arrows, the converted side conjugates the e-log
    closure through P_S.  For partial functors equality is only required on
    the image of P_S.
    """
    ok_s, mism_s = _one_causal_equation(e.S, e.N_tri, s.S, s.N_tri, p.P_S, s.action_ids)
    ok_n, mism_n = _one_causal_equation(e.N, e.S_tri, s.N, s.S_tri, p.P_S, s.action_ids)
    return ok_s, ok_n, tuple(sorted(set(mism_s + mism_n)))


def _one_causal_equation(
    C_e: BoolMatrix,
    tri_e: BoolMatrix,
    C_s: BoolMatrix,
    tri_s: BoolMatrix,
    P_S: BoolMatrix,
    s_ids: tuple[str, ...],
) -> tuple[bool, list[tuple[str, str]]]:
    closure_e = causal_closure(C_e | tri_e, allow_cycles=True)
    closure_s = causal_closure(C_s | tri_s, allow_cycles=True)
    ident = BoolMatrix.identity(s_ids)
    lhs = closure_s | ident
    rhs = (P_S @ closure_e @ P_S.transpose()) | ident
    image = _image_indices(P_S)
    mismatches = [
        (s_ids[i], s_ids[j])
        for i in image
        for j in image
        if lhs.get(i, j) != rhs.get(i, j)
    ]
    return not mismatches, mismatches


def check_who_equation(
    e: CauseMatrices, s: CauseMatrices, p: ConversionPair
) -> tuple[bool, tuple[tuple[str, str], ...]]:
    """Converted who arrows must coincide with the s-log's on every mapped
    action column."""
    converted = p.P_E @ e.E @ p.P_S.transpose()
    image = _image_indices(p.P_S)
    mismatches = []
    for j in image:
        if converted.column_mask(j) != s.E.column_mask(j):
            for i in range(len(s.participant_ids)):
                if converted.get(i, j) != s.E.get(i, j):
                    mismatches.append((s.participant_ids[i], s.action_ids[j]))
    return not mismatches, tuple(mismatches)


def check_function_rules(
    e: CauseMatrices,
    s: CauseMatrices,
    p: ConversionPair,
) -> tuple[bool, bool, bool, bool]:
    """(is_function, zero_column_rule_ok, surjective, injective).

    is_function: at most one entry per column of P_S and P_E.
    zero-column rule: an action whose performer is unmapped must be unmapped.
    surjective: every non-sentinel s-log row is hit.
    injective (e-log essentiality): every non-sentinel e-log column is hit.
    """
    is_function = all(
        p.P_S.column_mask(j).bit_count() <= 1 for j in range(len(e.action_ids))
    ) and all(
        p.P_E.column_mask(j).bit_count() <= 1 for j in range(len(e.participant_ids))
    )

    converted_who = p.P_E @ e.E
    zero_ok = all(
        p.P_S.column_mask(j) == 0
        for j in range(len(e.action_ids))
        if converted_who.column_mask(j) == 0
    )

    hit_s_actions = p.P_S.nonzero_rows()
    hit_s_parts = p.P_E.nonzero_rows()
    surjective = all(
        i in hit_s_actions
        for i, aid in enumerate(s.action_ids)
        if aid not in SENTINEL_ACTIONS
    ) and all(
        i in hit_s_parts
        for i, pid in enumerate(s.participant_ids)
        if pid != SENTINEL_NOBODY
    )

    mapped_e_actions = p.P_S.nonzero_cols()
    mapped_e_parts = p.P_E.nonzero_cols()
    injective = all(
        j in mapped_e_actions
        for j, aid in enumerate(e.action_ids)
        if aid not in SENTINEL_ACTIONS
    ) and all(
        j in mapped_e_parts
        for j, pid in enumerate(e.participant_ids)
        if pid != SENTINEL_NOBODY
    )

    return is_function, zero_ok, surjective, injective


def _trivial_pairs_preserved(
    e: CauseMatrices, s: CauseMatrices, action_map: dict[str, str]
) -> bool:
    s_tri_pairs = {(a, b) for a, b in s.S_tri.entry_ids()}
    for a, b in e.S_tri.entry_ids():
        fa, fb = action_map.get(a), action_map.get(b)
        if fa is None or fb is None or fa == fb:
            continue
        if (fa, fb) not in s_tri_pairs:
            return False
    return True


def evaluate_conversion(
    e: CauseMatrices,
    s: CauseMatrices,
    action_map: dict[str, str],
    participant_map: dict[str, str],
) -> CompletenessReport:
    """Run every completeness rule for the given object maps."""
    p = conversion_pair(e, s, action_map, participant_map)
    is_function, zero_ok, surjective, injective = check_function_rules(e, s, p)
    eq_s, eq_n, causal_mism = check_causal_equations(e, s, p)
    who_ok, who_mism = check_who_equation(e, s, p)
    return CompletenessReport(
        is_function=is_function,
        zero_column_rule_ok=zero_ok,
        surjective=surjective,
        injective=injective,
        causal_eq_S_ok=eq_s,
        causal_eq_N_ok=eq_n,
        who_eq_ok=who_ok,
        causal_mismatches=causal_mism,
        who_mismatches=who_mism,
        trivial_pairs_preserved=_trivial_pairs_preserved(e, s, action_map),
    )


def dump_matrices(log: ELog) -> str:
    """Golden-test dump of all adjacency matrices of one log."""
    m = adjacency(log)
    parts = [
        m.S.dump("S"),
        m.N.dump("N"),
        m.S_tri.dump("S_tri"),
        m.N_tri.dump("N_tri"),
        m.E.dump("E"),
    ]
    return "\n".join(parts) + "\n"
