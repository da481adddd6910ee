"""JSON instance files.

Two modes share one layout::

    {"n": 5, "D": 2, "mode": "permutations",
     "permutations": [[1, 2, 3, 4, 5], [3, 1, 5, 2, 4]],   # rank lists
     "labels": [0, 0, 1, 1, 1],
     "planted": {"monotone_index": 0, "threshold_rank": 3, ...},
     "metadata": {"generator": "random", ...}}

Geometry mode stores ``points`` and ``directions`` instead of
``permutations`` and re-derives the orderings on load; it may also list
``hypotheses`` as ``{"direction", "threshold", "inclusive"}`` objects.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .generators import GeneratedInstance
from .instance import (
    DirectionSet,
    GeometricHypothesis,
    InstanceError,
    PlantedTruth,
    PointSet,
    ShuffledInstance,
    project_to_instance,
)

FORMAT_VERSION = 1


def _planted_block(truth: PlantedTruth) -> dict | None:
    if truth.monotone_index is None:
        return None
    return {
        "monotone_index": truth.monotone_index,
        "threshold_rank": truth.threshold_rank,
        "boundary_low": truth.boundary_low,
        "boundary_high": truth.boundary_high,
    }


def to_dict(g: GeneratedInstance) -> dict:
    inst = g.instance
    doc = {"format_version": FORMAT_VERSION, "n": inst.n, "D": inst.D}
    if g.points is not None:
        doc["mode"] = "geometry"
        doc["points"] = g.points.points.tolist()
        doc["directions"] = g.directions.directions.tolist()
    else:
        doc["mode"] = "permutations"
        doc["permutations"] = inst.rank.tolist()
    doc["labels"] = g.truth.labeling.tolist()
    block = _planted_block(g.truth)
    if block is not None:
        doc["planted"] = block
    if g.hypotheses:
        doc["hypotheses"] = [
            {"direction": list(h.direction), "threshold": h.threshold, "inclusive": h.inclusive}
            for h in g.hypotheses
        ]
    if g.metadata:
        doc["metadata"] = g.metadata
    return doc


def _require(doc: dict, key: str):
    if key not in doc:
        raise InstanceError(f"instance file is missing {key!r}")
    return doc[key]


def from_dict(doc: dict) -> GeneratedInstance:
    mode = _require(doc, "mode")
    points = directions = None
    if mode == "permutations":
        inst = ShuffledInstance.from_ranks(_require(doc, "permutations"))
    elif mode == "geometry":
        points = PointSet(_require(doc, "points"))
        directions = DirectionSet(_require(doc, "directions"))
        inst = project_to_instance(points, directions)
    else:
        raise InstanceError(f"unknown mode {mode!r}")
    for key in ("n", "D"):
        if key in doc and doc[key] != getattr(inst, key):
            raise InstanceError(f"{key}={doc[key]} disagrees with the stored orderings")

    labels = np.array(_require(doc, "labels"), dtype=np.int64)
    if labels.shape != (inst.n,) or np.any((labels != 0) & (labels != 1)):
        raise InstanceError(f"labels must be {inst.n} bits")
    labels = labels.astype(np.uint8)
    labels.setflags(write=False)
    p = doc.get("planted")
    if p:
        truth = PlantedTruth(labels, p["monotone_index"], p["threshold_rank"],
                             p.get("boundary_low"), p.get("boundary_high"))
    else:
        truth = PlantedTruth(labels)
    hyps = tuple(
        GeometricHypothesis(tuple(h["direction"]), float(h["threshold"]),
                            bool(h.get("inclusive", False)))
        for h in doc.get("hypotheses", ())
    )
    return GeneratedInstance(inst, truth, dict(doc.get("metadata", {})), points,
                             directions, hyps)


def dumps(g: GeneratedInstance) -> str:
    return json.dumps(to_dict(g), separators=(",", ":"))


def loads(text: str) -> GeneratedInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise InstanceError(f"not valid JSON: {err}") from err
    if not isinstance(doc, dict):
        raise InstanceError("instance file must hold a JSON object")
    return from_dict(doc)


def save(g: GeneratedInstance, path) -> None:
    Path(path).write_text(dumps(g) + "\n")


def load(path) -> GeneratedInstance:
    return loads(Path(path).read_text())


__all__ = ["FORMAT_VERSION", "dumps", "from_dict", "load", "loads", "save", "to_dict"]
