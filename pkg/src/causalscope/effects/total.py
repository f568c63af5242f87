"""Total (direct plus mediated) effect computation.

For an acyclic weight matrix B the total-effect matrix is
T = (I - B)^-1 = I + B + B^2 + ..., which terminates because B is
nilpotent.  T[i][j] is the change in variable i per unit change in
variable j, accumulated over every directed path.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from causalscope.core.graph import CausalGraph
from causalscope.core.dataset import Dataset
from causalscope.errors import DataError, NumericalError


@dataclass(frozen=True, eq=False)
class EffectMatrices:
    """Direct weights B, total effects T, and the spectral radius of B."""

    nodes: tuple[str, ...]
    B: np.ndarray
    T: np.ndarray
    spectral_radius: float

    def node_index(self, name: str) -> int:
        try:
            return self.nodes.index(name)
        except ValueError:
            raise DataError(f"unknown node {name!r}") from None

    def tau(self, source: str, target: str) -> float:
        """Total effect of a unit increase in source on target."""
        return float(self.T[self.node_index(target), self.node_index(source)])

    def direct(self, source: str, target: str) -> float:
        return float(self.B[self.node_index(target), self.node_index(source)])

    def hops(self, k: int | None = None) -> list[np.ndarray]:
        """Path-length decomposition [I, B, B^2, ..., B^k]; entry m gives the
        effects carried by paths of exactly m edges.  Defaults to k = p - 1,
        after which every power of an acyclic B is zero."""
        p = len(self.nodes)
        if k is None:
            k = p - 1
        if k < 0:
            raise DataError("hop count must be non-negative")
        out = [np.eye(p)]
        for _ in range(k):
            out.append(out[-1] @ self.B)
        return out

    def downstream(self, source: str) -> dict[str, float]:
        """Every variable the source influences, with its total effect."""
        j = self.node_index(source)
        return {
            n: float(self.T[i, j])
            for i, n in enumerate(self.nodes)
            if i != j and self.T[i, j] != 0.0
        }

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "B": self.B.tolist(),
            "T": self.T.tolist(),
            "spectral_radius": self.spectral_radius,
        }


def total_effects(
    g: CausalGraph | np.ndarray, nodes: Iterable[str] | None = None
) -> EffectMatrices:
    """Invert the structural system to get total effects.

    Accepts a CausalGraph or a raw square weight matrix.  Raises
    NumericalError when (I - B) is singular; warns when the spectral radius
    reaches 1, where the infinite-path interpretation stops converging.
    """
    if isinstance(g, CausalGraph):
        B = np.asarray(g.B, dtype=float)
        names = g.nodes
    else:
        B = np.asarray(g, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise DataError("weight matrix must be square")
        names = tuple(nodes) if nodes is not None else tuple(f"x{i+1}" for i in range(B.shape[0]))
        if len(names) != B.shape[0]:
            raise DataError("node list length must match matrix size")
    p = B.shape[0]
    radius = float(np.max(np.abs(np.linalg.eigvals(B)))) if p else 0.0
    if radius >= 1.0:
        warnings.warn(
            f"spectral radius {radius:.3f} >= 1; total effects are not a convergent path sum",
            RuntimeWarning,
            stacklevel=2,
        )
    try:
        T = np.linalg.solve(np.eye(p) - B, np.eye(p))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"(I - B) is singular: {exc}") from exc
    T = np.asarray(T)
    T.setflags(write=False)
    return EffectMatrices(nodes=names, B=B, T=T, spectral_radius=radius)


def predict_intervention(
    em: EffectMatrices, source: str, a1: float, a2: float
) -> dict[str, float]:
    """Predicted shift of every other variable when the source moves from
    level a1 to level a2: delta = (a2 - a1) * tau."""
    j = em.node_index(source)
    shift = a2 - a1
    return {
        n: float(shift * em.T[i, j]) for i, n in enumerate(em.nodes) if i != j
    }


def default_levels(d: Dataset, variable: str) -> tuple[float, float]:
    """Default intervention levels: first and third quartiles of the
    variable's observed values (linear interpolation).  Raises DataError
    when the quartiles coincide, since the contrast would be empty."""
    col = d.column(variable)
    q1, q3 = np.percentile(col, [25.0, 75.0])
    if q1 == q3:
        raise DataError(f"variable {variable!r} has a degenerate interquartile range")
    return float(q1), float(q3)
