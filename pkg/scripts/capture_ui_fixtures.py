#!/usr/bin/env python3
"""Record real service responses as JSON fixtures for the grid UI tests.

Each fixture stores the request (method, path, body), the status code,
and the exact response body the service produced, so the UI test suite
can stub ``fetch`` with genuine payloads instead of hand-written fakes.

Writes to frontend/tests/fixtures/ by default.
"""

import argparse
import json
from pathlib import Path

from fastapi.testclient import TestClient

from cfsynth import create_app

IDS = ["GW2-T", "AN51-T", "GW105-T", "GW18", "AN47603-F", "GW19", "GW50-T", "GW12"]
IDS_CSV = "id\n" + "\n".join(IDS) + "\n"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parent.parent
        / "frontend"
        / "tests"
        / "fixtures",
    )
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    client = TestClient(create_app())
    captured = {}

    def record(name, method, path, body=None):
        if method == "GET":
            resp = client.get(path)
        else:
            resp = client.post(path, json=body)
        captured[name] = {
            "request": {"method": method, "path": path, "body": body},
            "status": resp.status_code,
            "response": resp.json(),
        }

    record("health", "GET", "/v1/health")
    record("config", "GET", "/v1/config")
    record(
        "suggest_one_example",
        "POST",
        "/v1/suggest",
        {
            "table": IDS_CSV,
            "examples": [{"row": 3, "format": "yellow"}],
            "top_k": 3,
        },
    )
    record(
        "suggest_two_examples",
        "POST",
        "/v1/suggest",
        {
            "table": IDS_CSV,
            "examples": [
                {"row": 3, "format": "yellow"},
                {"row": 4, "format": "yellow"},
            ],
            "top_k": 3,
        },
    )

    record(
        "suggest_three_examples",
        "POST",
        "/v1/suggest",
        {
            "table": IDS_CSV,
            "examples": [
                {"row": 3, "format": "yellow"},
                {"row": 5, "format": "yellow"},
                {"row": 7, "format": "yellow"},
            ],
            "top_k": 3,
        },
    )

    top_rule = captured["suggest_two_examples"]["response"]["suggestions"][
        "yellow"
    ][0]["rule"]
    record(
        "apply_top_rule",
        "POST",
        "/v1/apply",
        {"table": IDS_CSV, "column": "id", "rule": top_rule},
    )
    record(
        "error_missing_examples",
        "POST",
        "/v1/suggest",
        {"table": IDS_CSV},
    )
    record(
        "error_no_candidates",
        "POST",
        "/v1/suggest",
        {
            "table": "v\na\nb\na\nc\n",
            "examples": [{"row": 2, "format": "red"}],
        },
    )

    for name, payload in captured.items():
        path = args.out / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path} (status {payload['status']})")


if __name__ == "__main__":
    main()
