"""Synthetic survey respondents driven through the live HTTP API.

Each respondent opens a rating session and rates every stimulus with the
oracle metric's min-max-normalized distance (scaled to 0-10) plus seeded
Gaussian noise, clamped back into range. With zero noise the aggregated
scores are an affine image of the oracle distances, so the evaluation report
must correlate the oracle metric at r = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import httpx
import numpy as np

from . import metrics as metrics_mod
from .colors import parse_color

RATING_MAX = 10.0


@dataclass
class SimulationResult:
    dataset: str
    oracle_metric: str
    respondents: int
    judgments: int
    session_ids: list[str]


def oracle_ratings(pairs: list[dict], oracle_metric: str) -> dict[int, float]:
    """Min-max normalize the oracle metric's distances onto [0, RATING_MAX]."""
    desc = metrics_mod.registry_lookup(oracle_metric)
    dists = {
        p["id"]: metrics_mod.evaluate(desc, parse_color(p["a"]), parse_color(p["b"]))
        for p in pairs
    }
    lo = min(dists.values())
    hi = max(dists.values())
    span = hi - lo if hi > lo else 1.0
    return {pid: RATING_MAX * (d - lo) / span for pid, d in dists.items()}


def run_simulation(
    base_url: str,
    dataset: str,
    respondents: int,
    noise: float,
    seed: int,
    oracle_metric: str,
    timeout: float = 10.0,
) -> SimulationResult:
    if respondents < 1:
        raise ValueError("respondents must be >= 1")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    with httpx.Client(base_url=base_url, timeout=timeout) as client:
        info = client.get("/api/dataset", params={"dataset": dataset})
        if info.status_code != 200:
            raise RuntimeError(f"dataset {dataset!r}: {info.json().get('detail', info.text)}")
        base = oracle_ratings(info.json()["pairs"], oracle_metric)

        total = 0
        session_ids = []
        for i in range(respondents):
            rng = np.random.default_rng((seed, i))
            created = client.post(
                "/api/sessions",
                json={"mode": "rating", "dataset": dataset, "seed": seed + i,
                      "label": f"sim-{i}"},
            )
            created.raise_for_status()
            sid = created.json()["session_id"]
            session_ids.append(sid)
            while True:
                nxt = client.get(f"/api/sessions/{sid}/next")
                nxt.raise_for_status()
                stim = nxt.json()
                if stim.get("done"):
                    break
                pid = stim["pairs"][0]["id"]
                rating = base[pid] + noise * rng.standard_normal()
                rating = float(min(max(rating, 0.0), RATING_MAX))
                ack = client.post(
                    f"/api/sessions/{sid}/judgments",
                    json={"stimulus_id": stim["stimulus_id"], "response": rating,
                          "elapsed_ms": 0},
                )
                ack.raise_for_status()
                total += 1
    return SimulationResult(dataset, oracle_metric, respondents, total, session_ids)
