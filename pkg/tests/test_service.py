"""The HTTP session API, exercised through an in-process test client."""
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from treefreeze.ipda import _REGISTRY, register_ipda
from treefreeze.running_example import (
    ADVANCED_RESULT_TEXT,
    INITIAL_TREE_TEXT,
    TRACE_NEXT,
    TRACE_PREVIOUS_1,
    TRACE_PREVIOUS_2,
)
from treefreeze.service import create_app
from treefreeze.trees import parse_tree

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture()
def client():
    return TestClient(create_app())


def create_session(client, **overrides):
    body = {
        "traces": [["a", "b"], ["a", "b"], ["c"]],
        "tree": "->(a,b)",
        **overrides,
    }
    response = client.post("/sessions", json=body)
    assert response.status_code == 201, response.text
    return response.json()


def test_create_session_view_shape(client):
    view = create_session(client)
    assert view["id"] == "s1"
    assert view["tree"]["text"] == "->(a,b)"
    assert view["previous"] == []
    assert [v["trace"] for v in view["variants"]] == [["a", "b"], ["c"]]
    assert [v["count"] for v in view["variants"]] == [2, 1]
    assert [v["covered"] for v in view["variants"]] == [True, False]
    assert len(view["metrics"]) == 1
    assert view["algorithms"] == ["advanced", "baseline", "plain"]
    for name in ("reference", "rebuild", "worked-example"):
        assert name in view["available_ipdas"]


def test_create_session_seeds_from_the_log(client):
    view = create_session(client, tree=None)
    assert view["tree"]["text"] == "->(a,b)"
    assert view["previous"] == [["a", "b"]]


def test_create_session_from_log_path(client):
    view = create_session(
        client, traces=None, log_path=str(FIXTURES / "minimal.xes"), tree="a"
    )
    assert [v["trace"] for v in view["variants"]] == [["a", "b"]]


def test_create_session_input_errors(client):
    both = client.post(
        "/sessions", json={"traces": [["a"]], "log_path": "x", "tree": "a"}
    )
    assert both.status_code == 422
    assert both.json()["detail"]["error"] == "invalid-request"

    missing = client.post(
        "/sessions", json={"log_path": "does-not-exist.xes"}
    )
    assert missing.status_code == 422
    assert missing.json()["detail"]["error"] == "file-not-found"

    bad_tree = client.post(
        "/sessions", json={"traces": [["a"]], "tree": "->(a,%)"}
    )
    assert bad_tree.status_code == 422
    detail = bad_tree.json()["detail"]
    assert detail["error"] == "parse"
    assert detail["position"] == 5


def test_unknown_session_is_404(client):
    response = client.get("/sessions/s404/tree")
    assert response.status_code == 404
    assert response.json()["detail"]["error"] == "unknown-session"


def test_tree_and_variants_routes(client):
    view = create_session(client)
    sid = view["id"]
    tree = client.get(f"/sessions/{sid}/tree").json()
    assert tree["text"] == "->(a,b)"
    assert {node["id"] for node in tree["nodes"]} == {0, 1, 2}
    assert "digraph" in tree["dot"]

    variants = client.get(f"/sessions/{sid}/variants").json()["variants"]
    assert variants[0]["covered"] is True


def test_put_frozen_and_selection_errors(client):
    sid = create_session(client)["id"]
    ok = client.put(f"/sessions/{sid}/frozen", json={"paths": [[0]]})
    assert ok.status_code == 200
    assert ok.json() == {"frozen_paths": [[0]]}

    nested = client.put(
        f"/sessions/{sid}/frozen", json={"paths": [[0], []]}
    )
    assert nested.status_code == 422
    assert nested.json()["detail"]["error"] == "frozen-selection"

    dangling = client.put(
        f"/sessions/{sid}/frozen", json={"paths": [[7]]}
    )
    assert dangling.status_code == 422
    assert dangling.json()["detail"]["error"] == "invalid-request"

    # Failed updates leave the selection untouched.
    tree = client.get(f"/sessions/{sid}/tree").json()
    assert tree["frozen_paths"] == [[0]]


def test_increment_validation_errors(client):
    sid = create_session(client)["id"]
    for body in (
        {},
        {"variant": 0, "trace": ["a"]},
        {"variant": 0, "algorithm": "magic"},
        {"variant": 99},
    ):
        response = client.post(f"/sessions/{sid}/increments", json=body)
        assert response.status_code == 422
        assert response.json()["detail"]["error"] == "invalid-request"


def test_increment_and_coverage(client):
    sid = create_session(client)["id"]
    first = client.post(
        f"/sessions/{sid}/increments",
        json={"variant": 0, "algorithm": "plain"},
    )
    assert first.status_code == 200
    assert first.json()["previous"] == [["a", "b"]]

    response = client.post(
        f"/sessions/{sid}/increments",
        json={"variant": 1, "algorithm": "plain", "ipda": "rebuild"},
    )
    assert response.status_code == 200
    payload = response.json()
    assert payload["tree"]["text"] == "X(->(a,b),c)"
    assert payload["checks"] == {
        "frozen_preserved": True,
        "previous_accepted": True,
    }
    assert payload["previous"] == [["a", "b"], ["c"]]
    assert all(v["covered"] for v in payload["variants"])
    assert payload["report"]["fitness"] == 1.0


def test_budget_exhaustion_is_reported(client):
    # The very first quality report already needs the alignment search,
    # so an impossible budget surfaces on session creation.
    response = client.post(
        "/sessions",
        json={
            "traces": [list(TRACE_PREVIOUS_1)],
            "tree": INITIAL_TREE_TEXT,
            "search_budget": 1,
        },
    )
    assert response.status_code == 422
    assert response.json()["detail"]["error"] == "budget-exceeded"


def test_contract_violations_carry_their_stage(client):
    def stubborn(request):
        return parse_tree("->(z,z)")

    register_ipda("stubborn-service-stub", stubborn)
    try:
        sid = create_session(client, ipda="stubborn-service-stub")["id"]
        response = client.post(
            f"/sessions/{sid}/increments",
            json={"variant": 1, "algorithm": "plain"},
        )
    finally:
        _REGISTRY.pop("stubborn-service-stub")
    assert response.status_code == 422
    detail = response.json()["detail"]
    assert detail["error"] == "contract-violation"
    assert detail["stage"] == "ipda-postcondition"


def test_undo_conflict_when_nothing_happened(client):
    sid = create_session(client)["id"]
    response = client.post(f"/sessions/{sid}/undo")
    assert response.status_code == 409
    assert response.json()["detail"]["error"] == "nothing-to-undo"


def test_worked_example_walkthrough(client):
    view = create_session(
        client,
        traces=[
            list(TRACE_NEXT),
            list(TRACE_PREVIOUS_1),
            list(TRACE_PREVIOUS_2),
        ],
        tree=INITIAL_TREE_TEXT,
    )
    sid = view["id"]
    covered = {
        tuple(v["trace"]): v["covered"] for v in view["variants"]
    }
    assert covered[TRACE_PREVIOUS_1] and covered[TRACE_PREVIOUS_2]
    assert not covered[TRACE_NEXT]

    # Register the two already-covered traces, then freeze the choice
    # between e and a and feed the deviating trace to the advanced step.
    for trace in (TRACE_PREVIOUS_1, TRACE_PREVIOUS_2):
        response = client.post(
            f"/sessions/{sid}/increments",
            json={"trace": list(trace), "algorithm": "plain"},
        )
        assert response.status_code == 200
        assert response.json()["tree"]["text"] == INITIAL_TREE_TEXT

    frozen = client.put(f"/sessions/{sid}/frozen", json={"paths": [[1]]})
    assert frozen.status_code == 200

    increment = client.post(
        f"/sessions/{sid}/increments",
        json={
            "trace": list(TRACE_NEXT),
            "algorithm": "advanced",
            "ipda": "worked-example",
        },
    )
    assert increment.status_code == 200
    payload = increment.json()
    assert payload["tree"]["text"] == ADVANCED_RESULT_TEXT
    assert payload["tree"]["frozen_paths"] == [[1, 0]]
    assert payload["checks"] == {
        "frozen_preserved": True,
        "previous_accepted": True,
    }
    assert all(v["covered"] for v in payload["variants"])

    metrics = client.get(f"/sessions/{sid}/metrics").json()
    assert len(metrics["rows"]) == 4
    assert metrics["csv"].startswith("increment,fitness,precision,f_measure\n")
    assert metrics["rows"][-1]["fitness"] == 1.0

    undone = client.post(f"/sessions/{sid}/undo")
    assert undone.status_code == 200
    assert undone.json()["tree"]["text"] == INITIAL_TREE_TEXT
    assert undone.json()["tree"]["frozen_paths"] == [[1]]
    assert undone.json()["previous"] == [
        list(TRACE_PREVIOUS_1),
        list(TRACE_PREVIOUS_2),
    ]


def test_sessions_are_independent(client):
    first = create_session(client)["id"]
    second = create_session(client, tree="X(a,b)")["id"]
    assert first != second
    assert client.get(f"/sessions/{first}/tree").json()["text"] == "->(a,b)"
    assert client.get(f"/sessions/{second}/tree").json()["text"] == "X(a,b)"
