import random

import pytest

from cognilog.belog import BeLog
from cognilog.errors import SourceTargetMismatchError, TooLargeError
from cognilog.model import build_elog, Action, Participant
from cognilog.search import (
    Functor,
    SearchConfig,
    brute_force_functors,
    identity_functor,
    natural_transformation,
    score_functor,
    search_functors,
)

from conftest import load_belog, load_log, random_elog

EMPTY = BeLog()
EXHAUSTIVE = SearchConfig(max_candidates=10**6)


def test_weights_must_sum_to_one():
    with pytest.raises(ValueError):
        SearchConfig(weights=(0.5, 0.5, 0.5))


def test_identity_functor_scores_perfect():
    log = load_log("robot.elog")
    f = identity_functor(log)
    score = score_functor(f, log, log, EMPTY, SearchConfig())
    assert score.report.complete
    assert score.structural == 1.0
    assert score.total == pytest.approx(1.0)


def test_robot_worker_has_both_documented_mappings(robot, worker, robot_belog):
    results = search_functors(robot, worker, robot_belog, SearchConfig())
    assert len(results) >= 2
    maps = [f.participant_map["dolly"] for f, _ in results[:2]]
    assert set(maps) == {"worker", "cargo"}
    for f, score in results:
        assert score.report.complete


def test_search_is_deterministic(robot, worker, robot_belog):
    a = search_functors(robot, worker, robot_belog, SearchConfig())
    b = search_functors(robot, worker, robot_belog, SearchConfig())
    assert [(f.map_key(), s.total) for f, s in a] == [
        (f.map_key(), s.total) for f, s in b
    ]


def test_min_compatibility_prunes(robot, worker, robot_belog):
    cfg = SearchConfig(min_compatibility=0.9)
    results = search_functors(robot, worker, robot_belog, cfg)
    # every surviving pair must clear the bar, so the mean does too
    assert all(s.similarity >= 0.9 for _, s in results)


def test_beam_width_limits_branching(robot, worker, robot_belog):
    wide = search_functors(robot, worker, robot_belog, SearchConfig())
    narrow = search_functors(
        robot, worker, robot_belog, SearchConfig(beam_width=1)
    )
    assert len(narrow) <= len(wide)
    narrow_keys = {f.map_key() for f, _ in narrow}
    wide_keys = {f.map_key() for f, _ in wide}
    assert narrow_keys <= wide_keys


def test_brute_force_guard():
    rng = random.Random(1)
    big = random_elog(rng, max_actions=6)
    huge = build_elog(
        "huge",
        tuple(Action(id=f"a{i}", who="p") for i in range(9)),
        (Participant(id="p"),),
    )
    with pytest.raises(TooLargeError):
        brute_force_functors(huge, big, EXHAUSTIVE)


def test_search_matches_brute_force_on_fixtures(robot, worker):
    found = {f.map_key() for f, _ in search_functors(robot, worker, EMPTY, EXHAUSTIVE)}
    oracle = {f.map_key() for f in brute_force_functors(robot, worker, EXHAUSTIVE)}
    assert found == oracle


def test_partial_search_allows_unmapped_objects():
    e = load_log("explosion.elog")
    s = load_log("blast.slog")
    b = load_belog("blast.belog")
    cfg = SearchConfig(
        min_compatibility=0.5, require_surjective=False, require_injective=False
    )
    results = search_functors(e, s, b, cfg)
    assert results
    best, _ = results[0]
    assert best.action_map == {"exploded": "explodes", "was_near": "is_near"}
    assert "looked" not in best.action_map


# -- natural transformations ----------------------------------------------


def _alternative_abstractions():
    a = Functor(
        src="robot", dst="worker",
        action_map={"carried": "carries", "was_carried0": "carries",
                    "carried_load": "carries", "was_carried1": "is_carried"},
        participant_map={"robot": "worker", "dolly": "worker",
                         "bottle": "cargo"},
    )
    b = Functor(
        src="robot", dst="worker",
        action_map={"carried": "carries", "was_carried0": "is_carried",
                    "carried_load": "is_carried", "was_carried1": "is_carried"},
        participant_map={"robot": "worker", "dolly": "cargo",
                         "bottle": "cargo"},
    )
    return a, b


def test_nt_exists_for_identity_pair(worker):
    f, _ = _alternative_abstractions()
    components = natural_transformation(f, f, worker)
    assert components is not None
    assert all(fx == gx for fx, gx in components.values())


def test_nt_missing_between_alternative_abstractions(worker):
    f, g = _alternative_abstractions()
    assert natural_transformation(f, g, worker) is None


def test_nt_exists_through_causal_arrow(robot):
    h = Functor(
        src="worker", dst="robot", direction="s_to_e",
        action_map={"carries": "carried", "is_carried": "was_carried0"},
        participant_map={"worker": "robot", "cargo": "dolly"},
    )
    j = Functor(
        src="worker", dst="robot", direction="s_to_e",
        action_map={"carries": "carried", "is_carried": "carried_load"},
        participant_map={"worker": "robot", "cargo": "dolly"},
    )
    components = natural_transformation(h, j, robot)
    assert components is not None
    assert components["is_carried"] == ("was_carried0", "carried_load")


def test_nt_requires_parallel_functors(robot):
    f, _ = _alternative_abstractions()
    h = Functor(src="worker", dst="robot", action_map={}, participant_map={})
    with pytest.raises(SourceTargetMismatchError):
        natural_transformation(f, h, robot)
