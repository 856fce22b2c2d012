import json

from milnor.engine import mu_table
from milnor.fuzz import check_homotopy, check_moves, check_wk, iteration_rng, run_check, self_crossings
from milnor.gauss import MoveSpec, apply_move, parse_gauss_code


def test_campaigns_clean():
    assert check_moves(30, 1) == []
    assert check_wk(20, 1, k=2) == []
    assert check_wk(20, 1, k=2, self_only=True) == []
    assert check_homotopy(30, 1) == []


def test_iteration_rng_is_reproducible():
    assert iteration_rng(5, 3).random() == iteration_rng(5, 3).random()
    assert iteration_rng(5, 3).random() != iteration_rng(5, 4).random()


def test_campaign_catches_unsound_change():
    # a crossing change between components is not a homotopy; the comparison must notice it
    d = parse_gauss_code("component 1: U1+ O2+\ncomponent 2: O1+ U2+")
    e = apply_move(d, MoveSpec.make("crossing-change", crossing=1))
    assert [r.mu for r in mu_table(d, 2)] != [r.mu for r in mu_table(e, 2)]
    assert self_crossings(d) == []


def test_violation_is_replayable(monkeypatch):
    import milnor.fuzz as fuzz

    # replace surgery by an unsound change so the campaign has something to report
    monkeypatch.setattr(fuzz, "surgery_with_trees", lambda d, trees: _link_everything(d))
    found = fuzz.check_wk(5, 2, k=2)
    assert found
    v = found[0]
    doc = v.to_json()
    json.dumps(doc)
    assert doc["before"] != doc["after"]
    assert parse_gauss_code(doc["diagram"]).n >= 1


def _link_everything(d):
    # add a positive clasp between component 1 and every other component
    for i in range(1, d.n):
        d = apply_move(
            d, MoveSpec.make("R2-insert", over_component=0, over_slot=0, under_component=i, under_slot=0, sign=1, parallel=True)
        )
        d = apply_move(d, MoveSpec.make("crossing-change", crossing=max(d.crossing_ids())))
    if d.n == 1:
        d = apply_move(d, MoveSpec.make("R1-insert", component=0, slot=0, order="OU", sign=1))
    return d


def test_run_check_validation():
    import pytest

    with pytest.raises(ValueError):
        run_check("moves", 0, 1)
    with pytest.raises(ValueError):
        run_check("nope", 1, 1)
