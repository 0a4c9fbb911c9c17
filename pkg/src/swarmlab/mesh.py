"""Semantic topology: axis-aligned partition tree over node embeddings.

Rebuilds recursively split the region with maximum per-dimension variance
at its median until every leaf respects both the membership cap and the
load cap.  Points landing exactly on a split median are assigned a side
by an id-dependent coin so rebuilds are reproducible.  Queries descend
the tree in one comparison per level.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field
from math import inf
from typing import Iterable, Mapping, Sequence

import numpy as np


class OversizedLeafWarning(UserWarning):
    """A leaf exceeds its caps but splitting cannot make progress."""


class SubMeshIdError(ValueError):
    """Malformed sub-mesh id string; carries the offending position."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at step {position})")


@dataclass(frozen=True)
class SemanticPoint:
    """One capability embedding owned by a node."""

    owner: str
    vector: np.ndarray
    norm: float = field(init=False)

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=float)
        object.__setattr__(self, "vector", vec)
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ValueError(f"zero embedding vector for node {self.owner!r}")
        object.__setattr__(self, "norm", norm)


@dataclass(frozen=True)
class SubMeshId:
    """Path from the root: one (side, dimension) step per split."""

    path: tuple[tuple[str, int], ...] = ()

    def encode(self) -> str:
        return "|".join(f"{side}-{dim}" for side, dim in self.path)

    @classmethod
    def decode(cls, text: str) -> "SubMeshId":
        if text == "":
            return cls(())
        steps = []
        for pos, cell in enumerate(text.split("|")):
            side, sep, dim = cell.partition("-")
            if not sep or side not in ("L", "R"):
                raise SubMeshIdError(f"bad step {cell!r}", pos)
            try:
                dim_index = int(dim)
            except ValueError:
                raise SubMeshIdError(f"bad dimension in step {cell!r}", pos) from None
            if dim_index < 0:
                raise SubMeshIdError(f"negative dimension in step {cell!r}", pos)
            steps.append((side, dim_index))
        return cls(tuple(steps))

    @property
    def depth(self) -> int:
        return len(self.path)


@dataclass
class Region:
    """Axis-aligned box; internal when ``split`` is set, else a leaf."""

    bounds: np.ndarray                       # (d, 2) closed intervals
    split: tuple[int, float] | None = None   # (dimension, median)
    left: "Region | None" = None
    right: "Region | None" = None
    members: tuple[int, ...] = ()            # point indices (leaf only)

    @property
    def is_leaf(self) -> bool:
        return self.split is None


@dataclass
class MeshTree:
    points: list[SemanticPoint]
    root: Region
    beta_cap: int
    lambda_split: float

    def leaves(self) -> list[tuple[SubMeshId, Region]]:
        out: list[tuple[SubMeshId, Region]] = []

        def walk(region: Region, path: tuple[tuple[str, int], ...]):
            if region.is_leaf:
                out.append((SubMeshId(path), region))
                return
            dim, _ = region.split
            walk(region.left, path + (("L", dim),))
            walk(region.right, path + (("R", dim),))

        walk(self.root, ())
        return out

    def leaf_owners(self, region: Region) -> list[str]:
        return sorted({self.points[i].owner for i in region.members})


@dataclass(frozen=True)
class CoverageState:
    """Responsibility radius of one embedding under a bandwidth budget."""

    radius: float
    bandwidth_limit: float
    safety_margin: float = 0.8
    step: float = 0.05

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if not 0.0 < self.safety_margin < 1.0:
            raise ValueError("safety_margin must lie in (0, 1)")
        if not 0.0 < self.step < 1.0:
            raise ValueError("step must lie in (0, 1)")


def semantic_distance(
    a: Sequence[SemanticPoint] | SemanticPoint,
    b: Sequence[SemanticPoint] | SemanticPoint,
) -> float:
    """One minus the best cosine similarity across the two embedding sets."""
    a_points = [a] if isinstance(a, SemanticPoint) else list(a)
    b_points = [b] if isinstance(b, SemanticPoint) else list(b)
    if not a_points or not b_points:
        raise ValueError("both embedding sets must be non-empty")
    best = -1.0
    for pa in a_points:
        for pb in b_points:
            cos = float(np.dot(pa.vector, pb.vector) / (pa.norm * pb.norm))
            best = max(best, cos)
    return 1.0 - best


def _median_side_coin(point: SemanticPoint, slot: int, split_ordinal: int) -> str:
    payload = (
        b"median-tie:"
        + point.owner.encode("utf-8")
        + b":" + slot.to_bytes(8, "big")
        + b":" + split_ordinal.to_bytes(8, "big")
    )
    return "L" if hashlib.sha256(payload).digest()[0] & 1 == 0 else "R"


def build_partition(
    points: Sequence[SemanticPoint],
    beta_cap: int,
    lambda_split: float = inf,
    loads: Sequence[float] | None = None,
) -> MeshTree:
    """Recursively partition the embeddings into capped sub-meshes.

    A region splits while it holds more than ``beta_cap`` points or more
    than ``lambda_split`` summed load, at the median of its
    maximum-variance dimension.  When all member vectors coincide the
    split cannot progress and the oversized leaf is kept with a warning.
    """
    if not points:
        raise ValueError("at least one point is required")
    if beta_cap < 1:
        raise ValueError("beta_cap must be >= 1")
    matrix = np.vstack([p.vector for p in points])
    if loads is None:
        load_arr = np.zeros(len(points))
    else:
        load_arr = np.asarray(loads, dtype=float)
        if load_arr.shape[0] != len(points):
            raise ValueError("loads must align with points")
    root_bounds = np.stack([matrix.min(axis=0), matrix.max(axis=0)], axis=1)
    split_counter = 0

    def needs_split(idx: np.ndarray) -> bool:
        return len(idx) > beta_cap or float(load_arr[idx].sum()) > lambda_split

    def build(idx: np.ndarray, bounds: np.ndarray) -> Region:
        nonlocal split_counter
        if not needs_split(idx):
            return Region(bounds=bounds, members=tuple(int(i) for i in idx))
        var = matrix[idx].var(axis=0)
        dim = int(np.argmax(var))
        if var[dim] == 0.0:
            warnings.warn(
                f"leaf of {len(idx)} identical points exceeds caps; cannot split",
                OversizedLeafWarning,
            )
            return Region(bounds=bounds, members=tuple(int(i) for i in idx))
        values = matrix[idx, dim]
        median = float(np.median(values))
        ordinal = split_counter
        split_counter += 1
        left_mask = values < median
        right_mask = values > median
        on_median = ~(left_mask | right_mask)
        for k in np.nonzero(on_median)[0]:
            point_index = int(idx[k])
            if _median_side_coin(points[point_index], point_index, ordinal) == "L":
                left_mask[k] = True
            else:
                right_mask[k] = True
        left_idx, right_idx = idx[left_mask], idx[right_mask]
        if len(left_idx) == 0 or len(right_idx) == 0:
            warnings.warn(
                f"median split left one side empty at dim {dim}; cannot split",
                OversizedLeafWarning,
            )
            return Region(bounds=bounds, members=tuple(int(i) for i in idx))
        left_bounds = bounds.copy()
        left_bounds[dim, 1] = median
        right_bounds = bounds.copy()
        right_bounds[dim, 0] = median
        return Region(
            bounds=bounds,
            split=(dim, median),
            left=build(left_idx, left_bounds),
            right=build(right_idx, right_bounds),
        )

    root = build(np.arange(len(points)), root_bounds)
    return MeshTree(points=list(points), root=root, beta_cap=beta_cap, lambda_split=lambda_split)


def route_query(tree: MeshTree, query_vector: np.ndarray) -> tuple[SubMeshId, list[str]]:
    """Descend to the leaf containing the query; strictly-less goes left.

    Returns the leaf's sub-mesh id and its member node ids; the number of
    comparisons equals the leaf depth.
    """
    query = np.asarray(query_vector, dtype=float)
    region = tree.root
    path: list[tuple[str, int]] = []
    while not region.is_leaf:
        dim, median = region.split
        if query[dim] < median:
            path.append(("L", dim))
            region = region.left
        else:
            path.append(("R", dim))
            region = region.right
    return SubMeshId(tuple(path)), tree.leaf_owners(region)


def check_split_trigger(
    region: Region,
    request_rates: Mapping[str, float],
    tree: MeshTree,
    lambda_split: float | None = None,
) -> bool:
    """True when the leaf's summed member request rate strictly exceeds the cap."""
    if not region.is_leaf:
        raise ValueError("split trigger applies to leaf regions")
    cap = tree.lambda_split if lambda_split is None else lambda_split
    total = sum(request_rates.get(owner, 0.0) for owner in tree.leaf_owners(region))
    return total > cap


def update_coverage_radius(state: CoverageState, observed_load_in_ball: float) -> CoverageState:
    """Grow the radius while comfortably under budget, otherwise shrink it.

    Growth requires load strictly below ``safety_margin * bandwidth_limit``;
    hitting the margin exactly shrinks.
    """
    if observed_load_in_ball < state.safety_margin * state.bandwidth_limit:
        radius = state.radius * (1.0 + state.step)
    else:
        radius = state.radius * (1.0 - state.step)
    return CoverageState(
        radius=radius,
        bandwidth_limit=state.bandwidth_limit,
        safety_margin=state.safety_margin,
        step=state.step,
    )


def dump_tree(tree: MeshTree) -> list[str]:
    """One line per leaf: ``id<TAB>members<TAB>bounds`` (debug/golden format)."""
    lines = []
    for sub_id, region in tree.leaves():
        owners = ",".join(tree.leaf_owners(region))
        bounds = ";".join(
            f"{d}:[{region.bounds[d, 0]!r},{region.bounds[d, 1]!r}]"
            for d in range(region.bounds.shape[0])
        )
        lines.append(f"{sub_id.encode()}\t{owners}\t{bounds}")
    return lines
