"""Versioned JSON records for pipeline runs and their certificates."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .graph import Graph
from .io import graph_hash
from .verify import verify_nested_no_crossings

SCHEMA_VERSION = 1


class RecordError(ValueError):
    pass


@dataclass
class CertificateRecord:
    graph_hash: str
    n: int
    m: int
    config: dict
    stages: list
    certificate: Optional[dict]
    verdict: Optional[dict]
    failure: Optional[dict] = None
    timings: dict = field(default_factory=dict)

    def __post_init__(self):
        # the gate: a certificate is only ever stored next to a passing verdict
        if self.certificate is not None and not (self.verdict and self.verdict.get("passed")):
            raise RecordError("certificate present without a PASS verdict")

    def to_json(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "graph": {"hash": self.graph_hash, "n": self.n, "m": self.m},
            "config": self.config,
            "stages": self.stages,
            "certificate": self.certificate,
            "verdict": self.verdict,
            "failure": self.failure,
        }
        if self.timings:
            out["timings"] = self.timings
        return out

    @classmethod
    def from_pipeline(cls, G: Graph, config: dict, result) -> "CertificateRecord":
        timings = {}
        for i, st in enumerate(result.stages):
            if "seconds" in st:
                timings[f"{i}:{st['stage']}"] = st["seconds"]
        return cls(
            graph_hash=graph_hash(G),
            n=G.n,
            m=G.m,
            config=config,
            stages=result.stages,
            certificate=result.certificate.to_json() if result.certificate is not None else None,
            verdict=result.verdict,
            failure=result.failure,
            timings=timings,
        )


def load_certificate(text: str) -> tuple[list, list, Optional[str]]:
    """Pull ``(outer, inner, graph_hash)`` from a record or a bare certificate object."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecordError(f"certificate is not valid JSON: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise RecordError("certificate JSON must be an object")
    ghash = None
    if "schema_version" in obj:
        if obj["schema_version"] != SCHEMA_VERSION:
            raise RecordError(f"unsupported schema_version {obj['schema_version']!r}")
        ghash = (obj.get("graph") or {}).get("hash")
        obj = obj.get("certificate")
        if obj is None:
            raise RecordError("record holds no certificate")
    try:
        outer = [int(v) for v in obj["outer"]]
        inner = [int(v) for v in obj["inner"]]
    except (KeyError, TypeError, ValueError):
        raise RecordError("certificate needs integer arrays 'outer' and 'inner'") from None
    return outer, inner, ghash


def check_certificate(G: Graph, text: str) -> dict:
    outer, inner, ghash = load_certificate(text)
    verdict = verify_nested_no_crossings(G, outer, inner).to_json()
    out = {"schema_version": SCHEMA_VERSION, "graph_hash": graph_hash(G), "verdict": verdict}
    if ghash is not None:
        out["hash_matches"] = ghash == graph_hash(G)
    return out
