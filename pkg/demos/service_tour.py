#!/usr/bin/env python3
"""Tour the HTTP session API end to end.

By default the app is exercised in-process with the FastAPI test client,
so no server needs to be running.  Pass ``--url http://host:port`` to run
the identical tour against a live instance instead (start one with
``uvicorn treefreeze.service:app``).
"""
import argparse

from treefreeze.running_example import (
    INITIAL_TREE_TEXT,
    TRACE_NEXT,
    TRACE_PREVIOUS_1,
    TRACE_PREVIOUS_2,
)


def make_client(url: str | None):
    if url:
        import httpx

        return httpx.Client(base_url=url)
    from fastapi.testclient import TestClient

    from treefreeze.service import create_app

    return TestClient(create_app())


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--url", help="base URL of a running service")
    args = parser.parse_args()
    client = make_client(args.url)

    created = client.post(
        "/sessions",
        json={
            "traces": [
                list(TRACE_NEXT),
                list(TRACE_PREVIOUS_1),
                list(TRACE_PREVIOUS_2),
            ],
            "tree": INITIAL_TREE_TEXT,
        },
    )
    created.raise_for_status()
    view = created.json()
    sid = view["id"]
    print(f"created session {sid}")
    print(f"  tree     {view['tree']['text']}")
    for variant in view["variants"]:
        badge = "covered" if variant["covered"] else "NOT covered"
        print(f"  variant {variant['index']}: {','.join(variant['trace'])}"
              f"  ({badge})")

    for trace in (TRACE_PREVIOUS_1, TRACE_PREVIOUS_2):
        client.post(
            f"/sessions/{sid}/increments",
            json={"trace": list(trace), "algorithm": "plain"},
        )
    print("registered the two covered traces (plain steps, tree unchanged)")

    # Clicking a nested node after selecting its ancestor must fail loudly.
    rejected = client.put(
        f"/sessions/{sid}/frozen", json={"paths": [[1], [1, 0]]}
    )
    detail = rejected.json()["detail"]
    print(f"nested selection -> {rejected.status_code} {detail['error']}: "
          f"{detail['message']}")

    client.put(f"/sessions/{sid}/frozen", json={"paths": [[1]]})
    print("froze the choice block at path [1]")

    increment = client.post(
        f"/sessions/{sid}/increments",
        json={
            "trace": list(TRACE_NEXT),
            "algorithm": "advanced",
            "ipda": "worked-example",
        },
    ).json()
    print("applied the advanced increment:")
    print(f"  tree     {increment['tree']['text']}")
    print(f"  frozen   {increment['tree']['frozen_paths']}")
    print(f"  checks   {increment['checks']}")

    metrics = client.get(f"/sessions/{sid}/metrics").json()
    last = metrics["rows"][-1]
    print(f"  quality  fitness={last['fitness']:.4f} "
          f"precision={last['precision']:.4f} "
          f"f_measure={last['f_measure']:.4f}")

    undone = client.post(f"/sessions/{sid}/undo").json()
    print(f"undo -> {undone['tree']['text']}")


if __name__ == "__main__":
    main()
