"""Instances, generators, and the JSON instance/report formats."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .clustering import ClusteringRun
from .constraints import Grouping, Partition, check_t, required_count
from .errors import InputError, ParseError, ValidationError
from .oracles import CutOracle, GaussianMIOracle, GaussianModel, WeightedGraph, lex_key


@dataclass
class Instance:
    n: int
    edges: list            # [[u, v, w], ...] exactly as given
    groups: dict           # name -> [ids], insertion ordered
    t: float
    covariance: Optional[list] = None

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        check_t(self.t)
        self.grouping()
        self.graph()
        if self.covariance is not None:
            GaussianModel(self.covariance)
            if len(self.covariance) != self.n:
                raise ValidationError("covariance size does not match n")

    def grouping(self) -> Grouping:
        return Grouping(self.n, list(self.groups.values()), list(self.groups))

    def graph(self) -> WeightedGraph:
        return WeightedGraph(self.n, self.edges)

    def oracle(self):
        if self.covariance is not None:
            return GaussianMIOracle(GaussianModel(self.covariance))
        return CutOracle(self.graph())

    def to_dict(self) -> dict:
        out = {"n": self.n, "edges": [list(e) for e in self.edges],
               "groups": {k: list(v) for k, v in self.groups.items()}, "t": self.t}
        if self.covariance is not None:
            out["covariance"] = [list(r) for r in self.covariance]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        if not isinstance(data, dict):
            raise ParseError("instance must be a JSON object")
        for key in ("n", "edges", "groups", "t"):
            if key not in data:
                raise ParseError(f"missing field {key!r}")
        edges = data["edges"]
        if not isinstance(edges, list):
            raise ParseError("field 'edges' must be a list")
        for i, e in enumerate(edges):
            if (not isinstance(e, list) or len(e) != 3 or not all(isinstance(x, int) for x in e[:2])
                    or not isinstance(e[2], (int, float)) or isinstance(e[2], bool)):
                raise ParseError(f"edges[{i}] must be [int, int, number], got {e!r}")
        groups = data["groups"]
        if not isinstance(groups, dict):
            raise ParseError("field 'groups' must be an object mapping names to id lists")
        for name, ids in groups.items():
            if not isinstance(ids, list) or not all(isinstance(x, int) for x in ids):
                raise ParseError(f"groups[{name!r}] must be a list of integer ids")
        if not isinstance(data["t"], (int, float)) or isinstance(data["t"], bool):
            raise ParseError("field 't' must be a number")
        cov = data.get("covariance")
        if cov is not None and not (isinstance(cov, list) and all(isinstance(r, list) for r in cov)):
            raise ParseError("field 'covariance' must be a list of rows")
        for name, ids in groups.items():
            if len(set(ids)) != len(ids):
                dup = sorted({x for x in ids if ids.count(x) > 1})
                raise ValidationError(f"group {name!r} lists element(s) {dup} more than once")
        return cls(data["n"], edges, dict(groups), data["t"], cov)


def load_instance(path) -> Instance:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        return Instance.from_dict(data)
    except InputError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def dump_json(data, path):
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=False) + "\n", encoding="utf-8")


def save_instance(instance: Instance, path):
    dump_json(instance.to_dict(), path)


def read_edgelist_tsv(path, n: Optional[int] = None) -> tuple:
    """Read ``u<TAB>v[<TAB>w]`` lines (``#`` comments allowed); returns (n, edges)."""
    edges = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), start=1):
            if not row or row[0].startswith("#"):
                continue
            if len(row) not in (2, 3):
                raise ParseError(f"{path}: line {lineno}: expected 2 or 3 columns")
            try:
                u, v = int(row[0]), int(row[1])
                w = float(row[2]) if len(row) == 3 else 1
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from exc
            if isinstance(w, float) and w.is_integer():
                w = int(w)
            edges.append([u, v, w])
    top = max((max(e[0], e[1]) for e in edges), default=-1) + 1
    return (top if n is None else n), edges


@dataclass(frozen=True)
class CounterexampleSpec:
    n: int = 100
    t: float = 0.51
    eps: float = 0.01
    k: int = 10
    tree: str = "path"

    def sizes(self) -> tuple:
        """(clique size, path size) = (floor((1 - t) n), ceil(t n))."""
        light = required_count(self.t, self.n)
        return self.n - light, light

    def validate(self):
        check_t(self.t)
        if not self.eps > 0:
            raise InputError("eps must be positive")
        if self.tree != "path":
            raise InputError(f"unsupported tree shape {self.tree!r}; only 'path' is available")
        heavy, light = self.sizes()
        if heavy < 2 or light < 3:
            raise InputError(f"need at least 2 clique and 3 tree vertices, got {heavy} and {light}")


def make_counterexample(spec: CounterexampleSpec = CounterexampleSpec()) -> tuple:
    """Heavy clique plus light path, one group containing every vertex.

    Returns ``(instance, landmarks)``; landmarks hold the clique ``V1``,
    the path vertices ``V2`` in path order, and its endpoints ``a``, ``b``.
    """
    spec.validate()
    heavy, light = spec.sizes()
    v1 = list(range(heavy))
    v2 = list(range(heavy, spec.n))
    edges = [[u, v, 1 / spec.eps] for i, u in enumerate(v1) for v in v1[i + 1:]]
    edges += [[v2[i], v2[i + 1], spec.eps] for i in range(light - 1)]
    inst = Instance(spec.n, edges, {"all": list(range(spec.n))}, spec.t)
    landmarks = {"n": spec.n, "V1": v1, "V2": v2, "a": v2[0], "b": v2[-1], "tree": spec.tree}
    return inst, landmarks


def make_alternative_partition(landmarks: dict, k: int) -> Partition:
    """Clique plus both path endpoints as one block; the inner path cut into k - 1 segments."""
    if landmarks.get("tree", "path") != "path":
        raise InputError("the alternative partition is only defined for a path tree")
    if k < 2:
        raise InputError("k must be at least 2")
    inner = landmarks["V2"][1:-1]
    if len(inner) < k - 1:
        raise InputError(f"path interior has {len(inner)} vertices, cannot form {k - 1} segments")
    first = landmarks["V1"] + [landmarks["a"], landmarks["b"]]
    base, extra = divmod(len(inner), k - 1)
    segments, pos = [], 0
    for i in range(k - 1):
        size = base + (1 if i < extra else 0)
        segments.append(inner[pos:pos + size])
        pos += size
    return Partition(landmarks["n"], [first] + segments)


def random_instance(seed: int, n: int, density: float = 0.5, weights: tuple = (1, 9),
                    m: int = 1, t: float = 0.5) -> Instance:
    """Seeded random graph instance with integer weights and ``m`` groups."""
    if n < 2:
        raise InputError("n must be at least 2")
    if not 1 <= m <= n:
        raise InputError(f"m={m} must lie in 1..{n}")
    if not 0 < density <= 1:
        raise InputError("density must lie in (0, 1]")
    lo, hi = weights
    if not (isinstance(lo, int) and isinstance(hi, int) and 0 <= lo <= hi):
        raise InputError("weight range must be integers with 0 <= lo <= hi")
    check_t(t)
    rng = np.random.default_rng(seed)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if density >= 1 or rng.random() < density:
                edges.append([u, v, int(rng.integers(lo, hi + 1))])
    labels = np.arange(n) % m
    rng.shuffle(labels)
    groups = {f"g{j}": [int(x) for x in np.flatnonzero(labels == j)] for j in range(m)}
    return Instance(n, edges, groups, t)


def random_gaussian_instance(seed: int, n: int, m: int = 1, t: float = 0.5) -> Instance:
    """Seeded instance with a well-conditioned random covariance (MI oracle)."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    cov = a @ a.T / n + np.eye(n)
    labels = np.arange(n) % m
    rng.shuffle(labels)
    groups = {f"g{j}": [int(x) for x in np.flatnonzero(labels == j)] for j in range(m)}
    return Instance(n, [], groups, t, cov.tolist())


def run_to_report(run: ClusteringRun, grouping: Grouping, seed=None) -> dict:
    order = sorted(range(len(run.partition)), key=lambda i: lex_key(run.partition.blocks[i]))
    clusters = [sorted(run.partition.blocks[i]) for i in order]
    cert = None
    if run.certificate is not None:
        cert = {"group": grouping.names[run.certificate.group],
                "cluster": order.index(run.certificate.block),
                "fraction": run.certificate.fraction}
    params = dict(run.params)
    params["seed"] = seed
    return {
        "algorithm": run.algorithm,
        "params": {key: params.get(key) for key in ("k", "t", "group", "seed")},
        "clusters": clusters,
        "cost": run.cost,
        "oracle_calls": run.oracle_calls,
        "feasible": run.feasible,
        "certificate": cert,
        "degraded": run.degraded,
        "trace": run.trace,
    }


def save_report(report: dict, path):
    dump_json(report, path)


def load_report(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    for key in ("algorithm", "clusters", "cost", "feasible", "certificate"):
        if key not in data:
            raise ParseError(f"{path}: report is missing field {key!r}")
    return data
