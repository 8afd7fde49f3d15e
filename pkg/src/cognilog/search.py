"""Functor search between an e-log and an s-log.

Candidates are built by backtracking over action mappings in causal
topological order; the participant map is forced through the who arrows as
soon as an action is mapped.  Matrix-engine completeness rules prune and
filter, a brute-force enumerator serves as the correctness oracle, and a
thin-category reachability test decides natural transformations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .belog import BeLog, mapping_compatibility
from .boolmat import (
    CauseMatrices,
    CompletenessReport,
    adjacency,
    causal_closure,
    BoolMatrix,
    evaluate_conversion,
)
from .errors import SourceTargetMismatchError, TooLargeError
from .model import (
    ELog,
    SENTINEL_ACTIONS,
    SENTINEL_NOBODY,
    SENTINELS,
    canonical_action_order,
)
from .temporal import check_temporal_consistency


@dataclass(frozen=True)
class Functor:
    """Paired object maps between two logs (non-sentinel objects only;
    sentinels always map to their counterparts)."""

    src: str
    dst: str
    action_map: dict[str, str]
    participant_map: dict[str, str]
    direction: str = "e_to_s"

    def map_key(self) -> tuple:
        return (
            tuple(sorted(self.action_map.items())),
            tuple(sorted(self.participant_map.items())),
        )

    def mapped_objects(self) -> set[str]:
        return set(self.action_map) | set(self.participant_map)

    def image_objects(self) -> set[str]:
        return set(self.action_map.values()) | set(self.participant_map.values())


@dataclass(frozen=True)
class Score:
    structural: float
    temporal: float
    similarity: float
    total: float
    report: CompletenessReport


@dataclass(frozen=True)
class SearchConfig:
    weights: tuple[float, float, float] = (0.5, 0.25, 0.25)
    min_compatibility: float = 0.0
    max_candidates: int = 10
    require_surjective: bool = True
    require_injective: bool = True
    beam_width: int = 0  # 0 = exhaustive backtracking
    composition_depth: int = 3

    def __post_init__(self):
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        if not 0.0 <= self.min_compatibility <= 1.0:
            raise ValueError("min_compatibility must be in [0, 1]")


def identity_functor(log: ELog) -> Functor:
    return Functor(
        src=log.id,
        dst=log.id,
        action_map={a.id: a.id for a in log.nonsentinel_actions},
        participant_map={p.id: p.id for p in log.nonsentinel_participants},
    )


def score_functor(
    functor: Functor, e: ELog, s: ELog, b: BeLog, cfg: SearchConfig,
    report: Optional[CompletenessReport] = None,
) -> Score:
    """Deterministic score: structure, temporal consistency, similarity."""
    if report is None:
        report = evaluate_conversion(
            adjacency(e), adjacency(s), functor.action_map, functor.participant_map
        )
    hard = report.hard_checks()
    n_e = len(e.nonsentinel_actions) + len(e.nonsentinel_participants)
    n_s = len(s.nonsentinel_actions) + len(s.nonsentinel_participants)
    mapped = len(functor.action_map) + len(functor.participant_map)
    hit = len(functor.image_objects() - SENTINELS)
    coverage = 1.0 if n_e + n_s == 0 else (mapped + hit) / (n_e + n_s)
    structural = (sum(hard) / len(hard)) * coverage

    temporal = check_temporal_consistency(e, s, functor).consistency_fraction

    pairs = list(functor.action_map.items()) + list(functor.participant_map.items())
    similarity = (
        1.0
        if not pairs
        else sum(mapping_compatibility(b, x, y) for x, y in pairs) / len(pairs)
    )
    w1, w2, w3 = cfg.weights
    total = w1 * structural + w2 * temporal + w3 * similarity
    return Score(structural, temporal, similarity, total, report)


def _who_of(log: ELog) -> dict[str, str]:
    return {a.id: a.who for a in log.actions}


def _admissible(
    functor_checks: CompletenessReport, cfg: SearchConfig
) -> bool:
    r = functor_checks
    if not (r.is_function and r.zero_column_rule_ok):
        return False
    if not (r.causal_eq_S_ok and r.causal_eq_N_ok and r.who_eq_ok):
        return False
    if cfg.require_surjective and not r.surjective:
        return False
    if cfg.require_injective and not r.injective:
        return False
    return True


def _forced_pmap(
    e: ELog, s: ELog, action_map: dict[str, str]
) -> Optional[dict[str, str]]:
    """Participant map forced through who; None when inconsistent."""
    who_e, who_s = _who_of(e), _who_of(s)
    e_parts = set(e.participant_by_id)
    s_parts = set(s.participant_by_id)
    pmap: dict[str, str] = {}
    for x, y in action_map.items():
        p, q = who_e[x], who_s[y]
        if p == SENTINEL_NOBODY and q == SENTINEL_NOBODY:
            continue
        if p == SENTINEL_NOBODY or q == SENTINEL_NOBODY:
            return None
        if p not in e_parts or q not in s_parts:
            # who targets a nominalized action; constrained via the action map
            continue
        if pmap.setdefault(p, q) != q:
            return None
    return pmap


def _leftover_participants(e: ELog, pmap: dict[str, str]) -> list[str]:
    return sorted(
        p.id for p in e.nonsentinel_participants if p.id not in pmap
    )


def _participant_completions(
    e: ELog,
    s: ELog,
    base: dict[str, str],
    allow_partial: bool,
    targets_filter=None,
) -> Iterable[dict[str, str]]:
    """Extend the forced participant map over performers of no action."""
    leftovers = _leftover_participants(e, base)
    if not leftovers:
        yield dict(base)
        return
    s_targets = sorted(p.id for p in s.nonsentinel_participants)
    options: list[list[Optional[str]]] = []
    for p in leftovers:
        opts: list[Optional[str]] = [
            q for q in s_targets if targets_filter is None or targets_filter(p, q)
        ]
        if allow_partial:
            opts.append(None)
        options.append(opts)
    for combo in itertools.product(*options):
        out = dict(base)
        for p, q in zip(leftovers, combo):
            if q is not None:
                out[p] = q
        yield out


def brute_force_functors(e: ELog, s: ELog, cfg: SearchConfig) -> list[Functor]:
    """Oracle: enumerate every total action map and keep the admissible ones.

    Guarded to small logs; intended for tests and verification runs.
    """
    e_actions = [a.id for a in e.nonsentinel_actions]
    s_actions = [a.id for a in s.nonsentinel_actions]
    if len(e_actions) > 8 or len(s_actions) > 8:
        raise TooLargeError("brute force is limited to 8 actions per side")
    e_m, s_m = adjacency(e), adjacency(s)
    found: list[Functor] = []
    if not s_actions and e_actions:
        return []
    for images in itertools.product(s_actions, repeat=len(e_actions)):
        amap = dict(zip(e_actions, images))
        base = _forced_pmap(e, s, amap)
        if base is None:
            continue
        for pmap in _participant_completions(e, s, base, allow_partial=False):
            report = evaluate_conversion(e_m, s_m, amap, pmap)
            if _admissible(report, cfg):
                found.append(
                    Functor(src=e.id, dst=s.id, action_map=amap,
                            participant_map=pmap)
                )
    found.sort(key=lambda f: f.map_key())
    return found


def search_functors(
    e: ELog, s: ELog, b: BeLog, cfg: SearchConfig
) -> list[tuple[Functor, Score]]:
    """Ranked functor candidates from the e-log into the s-log.

    Backtracks over actions in causal-topological order.  When totality of the
    object maps is not required (require_injective off), actions and leftover
    participants may stay unmapped, which yields the partial functors used by
    inference.
    """
    e_m, s_m = adjacency(e), adjacency(s)
    e_actions = [a for a in canonical_action_order(e) if a not in SENTINEL_ACTIONS]
    s_actions = sorted(a.id for a in s.nonsentinel_actions)
    who_e, who_s = _who_of(e), _who_of(s)

    compat_cache: dict[tuple[str, str], float] = {}

    def compat(x: str, y: str) -> float:
        key = (x, y)
        if key not in compat_cache:
            compat_cache[key] = mapping_compatibility(b, x, y)
        return compat_cache[key]

    def compat_ok(x: str, y: str) -> bool:
        return compat(x, y) >= cfg.min_compatibility

    # pruning tables: an e-side causal closure entry must land on an s-side
    # closure entry (or collapse onto an identity)
    closure_e_S = causal_closure(e_m.S | e_m.N_tri, allow_cycles=True)
    closure_e_N = causal_closure(e_m.N | e_m.S_tri, allow_cycles=True)
    closure_s_S = causal_closure(s_m.S | s_m.N_tri, allow_cycles=True)
    closure_s_N = causal_closure(s_m.N | s_m.S_tri, allow_cycles=True)

    def rel(closure: BoolMatrix, ids: tuple[str, ...], x: str, y: str) -> bool:
        return closure.get(ids.index(x), ids.index(y))

    results: dict[tuple, tuple[Functor, Score]] = {}

    def consistent_with(
        x: str, y: str, amap: dict[str, str]
    ) -> bool:
        for z, fz in amap.items():
            for closure_e, closure_s in (
                (closure_e_S, closure_s_S),
                (closure_e_N, closure_s_N),
            ):
                if rel(closure_e, e_m.action_ids, x, z) and fz != y:
                    if not rel(closure_s, s_m.action_ids, y, fz):
                        return False
                if rel(closure_e, e_m.action_ids, z, x) and fz != y:
                    if not rel(closure_s, s_m.action_ids, fz, y):
                        return False
        return True

    def finalize(amap: dict[str, str], pmap: dict[str, str]) -> None:
        def pfilter(p: str, q: str) -> bool:
            return compat_ok(p, q)

        for full_pmap in _participant_completions(
            e, s, pmap, allow_partial=not cfg.require_injective,
            targets_filter=pfilter,
        ):
            report = evaluate_conversion(e_m, s_m, amap, full_pmap)
            if not _admissible(report, cfg):
                continue
            functor = Functor(
                src=e.id, dst=s.id, action_map=dict(amap),
                participant_map=full_pmap,
            )
            key = functor.map_key()
            if key not in results:
                results[key] = (
                    functor,
                    score_functor(functor, e, s, b, cfg, report=report),
                )

    def backtrack(i: int, amap: dict[str, str], pmap: dict[str, str]) -> None:
        if i == len(e_actions):
            finalize(amap, pmap)
            return
        x = e_actions[i]
        p = who_e[x]
        p_is_part = p in e.participant_by_id and p != SENTINEL_NOBODY
        options = []
        for y in s_actions:
            if not compat_ok(x, y):
                continue
            q = who_s[y]
            if p == SENTINEL_NOBODY or q == SENTINEL_NOBODY:
                if p != q:
                    continue
            elif p_is_part and q in s.participant_by_id:
                if p in pmap:
                    if pmap[p] != q:
                        continue
                elif not compat_ok(p, q):
                    continue
            if not consistent_with(x, y, amap):
                continue
            options.append(y)
        if cfg.beam_width > 0:
            options.sort(key=lambda y: (-compat(x, y), y))
            options = options[: cfg.beam_width]
        for y in options:
            q = who_s[y]
            amap[x] = y
            added = p_is_part and p not in pmap and q in s.participant_by_id
            if added:
                pmap[p] = q
            backtrack(i + 1, amap, pmap)
            del amap[x]
            if added:
                del pmap[p]
        if not cfg.require_injective:
            backtrack(i + 1, amap, pmap)  # leave x unmapped

    backtrack(0, {}, {})

    ranked = sorted(
        results.values(), key=lambda fs: (-fs[1].total, fs[0].map_key())
    )
    return ranked[: cfg.max_candidates]


# -- natural transformations ----------------------------------------------


def _arrow_reachability(log: ELog) -> dict[str, set[str]]:
    """Reachability through who/cause arrows plus identities (thin-category
    reading: any two parallel arrow-paths are equal)."""
    succ: dict[str, set[str]] = {oid: set() for oid in log.object_ids()}
    for a in log.actions:
        succ[a.id].update({a.who, a.cause_s, a.cause_n})
        succ[a.id].discard(a.id)
    reach = {node: set(nxt) for node, nxt in succ.items()}
    changed = True
    while changed:
        changed = False
        for node in reach:
            acc = set(reach[node])
            for nxt in list(reach[node]):
                acc |= reach.get(nxt, set())
            if acc != reach[node]:
                reach[node] = acc
                changed = True
    for node in reach:
        reach[node].add(node)  # identity morphisms
    return reach


def natural_transformation(
    f: Functor, g: Functor, target: ELog
) -> Optional[dict[str, tuple[str, str]]]:
    """Component assignment of a natural transformation from f to g.

    Exists iff every source object's two images are connected by an arrow
    path in the target log; naturality squares then commute automatically in
    the thin-category reading.  Returns {object: (F(x), G(x))} or None.
    """
    if f.src != g.src or f.dst != g.dst:
        raise SourceTargetMismatchError(
            f"functors {f.src}->{f.dst} and {g.src}->{g.dst} are not parallel"
        )
    reach = _arrow_reachability(target)
    components: dict[str, tuple[str, str]] = {}
    objects = sorted(f.mapped_objects() | g.mapped_objects())
    for x in objects:
        fx = f.action_map.get(x) or f.participant_map.get(x)
        gx = g.action_map.get(x) or g.participant_map.get(x)
        if fx is None or gx is None:
            return None
        if gx not in reach.get(fx, set()):
            return None
        components[x] = (fx, gx)
    return components
