"""Linear non-Gaussian structure learning from observational data.

The estimator recovers a weighted DAG from an i.i.d. sample by unmixing the
data with FastICA, permuting the unmixing rows so the diagonal dominates,
and pruning the resulting connection matrix until its pattern admits a
causal (topological) order.  Everything is seeded: the same data, seed, and
configuration reproduce the same graph bit for bit.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from causalscope.core.dataset import Dataset
from causalscope.core.graph import CausalGraph, _pattern_topo_order
from causalscope.errors import DataError, NumericalError

METHODS = ("lingam", "diffan")

# Guard against division by vanishing unmixing entries when building the
# assignment cost; matches are effectively forbidden below this magnitude.
_TINY = 1e-12


@dataclass(frozen=True)
class DiscoveryConfig:
    """Knobs for a discovery run.

    ``method`` selects the estimator ("diffan" is a reserved name and not
    implemented).  ``n_bootstrap`` controls the resampling pass; replicate i
    is seeded with ``seed + i``.  Edges survive filtering only when their
    stability is at least ``retention_stability`` and their appearance
    frequency at least ``retention_frequency``.  ``prune_threshold`` zeroes
    small weights after each single fit.  When
    ``exclude_failed_from_frequency`` is set, replicates that raised are
    removed from the frequency denominator instead of counting as absences.
    """

    method: str = "lingam"
    seed: int = 0
    n_bootstrap: int = 100
    retention_stability: float = 0.6
    retention_frequency: float = 0.5
    prune_threshold: float = 0.05
    ica_max_iter: int = 1000
    ica_tol: float = 1e-6
    exclude_failed_from_frequency: bool = False

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise DataError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.n_bootstrap < 1:
            raise DataError("n_bootstrap must be at least 1")
        if not 0.0 < self.retention_stability <= 1.0:
            raise DataError("retention_stability must lie in (0, 1]")
        if not 0.0 <= self.retention_frequency <= 1.0:
            raise DataError("retention_frequency must lie in [0, 1]")
        if self.prune_threshold < 0.0:
            raise DataError("prune_threshold must be non-negative")
        if self.ica_max_iter < 1:
            raise DataError("ica_max_iter must be at least 1")
        if self.ica_tol <= 0.0:
            raise DataError("ica_tol must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DiscoveryConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise DataError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str | bytes) -> "DiscoveryConfig":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid config JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise DataError("config JSON must be an object")
        return cls.from_dict(payload)


def _sym_decorrelation(W: np.ndarray) -> np.ndarray:
    s, u = np.linalg.eigh(W @ W.T)
    if s[0] <= _TINY * max(s[-1], 1.0):
        raise NumericalError("unmixing matrix became singular during decorrelation")
    return (u * (1.0 / np.sqrt(s))) @ u.T @ W


def _whiten(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Center and rotate so components have unit variance.  Returns the
    whitened sample and the whitening matrix K with X_white = X_centered @ K.T."""
    Xc = X - X.mean(axis=0)
    cov = Xc.T @ Xc / Xc.shape[0]
    d, E = np.linalg.eigh(cov)
    if d[0] <= _TINY * max(d[-1], 1.0):
        raise NumericalError("covariance matrix is singular; variables may be collinear")
    K = (E / np.sqrt(d)).T
    return Xc @ K.T, K


def _fastica(
    X_white: np.ndarray, rng: np.random.Generator, max_iter: int, tol: float
) -> tuple[np.ndarray, bool]:
    """Symmetric fixed-point ICA with the tanh contrast.

    Returns the square unmixing matrix for the whitened data and a
    convergence flag.  On non-convergence the best (last) iterate is
    returned rather than raising; the caller decides how to report it.
    """
    n, p = X_white.shape
    W = _sym_decorrelation(rng.standard_normal((p, p)))
    Xt = X_white.T
    converged = False
    for _ in range(max_iter):
        WX = W @ Xt
        g = np.tanh(WX)
        g_prime = 1.0 - g**2
        W_new = g @ X_white / n - (g_prime.mean(axis=1)[:, None]) * W
        W_new = _sym_decorrelation(W_new)
        lim = float(np.max(np.abs(np.abs(np.diag(W_new @ W.T)) - 1.0)))
        W = W_new
        if lim < tol:
            converged = True
            break
    return W, converged


def _causal_order(B: np.ndarray) -> list[int]:
    """Find a causal order by zeroing the smallest-magnitude entries.

    Sets the p(p+1)/2 smallest |B| entries to zero, then keeps zeroing the
    next smallest until the remaining pattern is acyclic.  Returns the
    resulting topological order (column j before row i for every kept edge).
    """
    p = B.shape[0]
    flat = [(abs(B[i, j]), i, j) for i in range(p) for j in range(p) if i != j]
    flat.sort(key=lambda t: (t[0], t[1], t[2]))
    mask = B != 0.0
    np.fill_diagonal(mask, False)
    n_zero = p * (p + 1) // 2
    for _, i, j in flat[:n_zero]:
        mask[i, j] = False
    k = n_zero
    while True:
        order = _pattern_topo_order(mask)
        if order is not None:
            return order
        if k >= len(flat):  # pragma: no cover - empty pattern is always acyclic
            raise NumericalError("failed to find a causal order")
        _, i, j = flat[k]
        mask[i, j] = False
        k += 1


def _fit_matrix(
    X: np.ndarray, cfg: DiscoveryConfig, seed: int
) -> tuple[np.ndarray, bool]:
    """Single structure fit on a raw sample.  Returns (B, converged)."""
    p = X.shape[1]
    X_white, K = _whiten(X)
    rng = np.random.default_rng(seed)
    W_white, converged = _fastica(X_white, rng, cfg.ica_max_iter, cfg.ica_tol)
    W = W_white @ K

    # Permute rows so each component lines up with the variable it explains:
    # maximize |diagonal| via an assignment on reciprocal magnitudes.
    cost = 1.0 / np.maximum(np.abs(W), _TINY)
    row_ind, col_ind = linear_sum_assignment(cost)
    perm = np.empty(p, dtype=int)
    perm[col_ind] = row_ind
    W_perm = W[perm]

    diag = np.diag(W_perm).copy()
    if np.any(np.abs(diag) <= _TINY):
        raise NumericalError("degenerate unmixing diagonal after permutation")
    B = np.eye(p) - W_perm / diag[:, None]
    np.fill_diagonal(B, 0.0)

    order = _causal_order(B)
    pos = np.empty(p, dtype=int)
    for rank, node in enumerate(order):
        pos[node] = rank

    B_final = B.copy()
    B_final[np.abs(B_final) < cfg.prune_threshold] = 0.0
    for i in range(p):
        for j in range(p):
            if pos[j] >= pos[i]:  # source must precede target in the order
                B_final[i, j] = 0.0
    return B_final, converged


def fit_lingam(d: Dataset, cfg: DiscoveryConfig | None = None) -> CausalGraph:
    """Estimate a weighted causal DAG from a dataset with a single fit.

    Requires at least two variables, at least 10 rows per variable, and no
    constant columns.  Non-convergence of the ICA loop is reported with a
    warning and recorded in provenance["converged"]; the best iterate is
    still used.  Edge records carry no stability metadata here; use the
    bootstrap pass for that.
    """
    cfg = cfg or DiscoveryConfig()
    if cfg.method == "diffan":
        raise NotImplementedError("method 'diffan' is reserved but not implemented")
    if d.p < 2:
        raise DataError("discovery needs at least two variables")
    if d.rows < 10 * d.p:
        raise DataError(
            f"discovery needs at least {10 * d.p} rows for {d.p} variables, got {d.rows}"
        )
    stds = d.values.std(axis=0)
    constant = [d.variables[i] for i in np.flatnonzero(stds == 0.0)]
    if constant:
        raise DataError(f"constant columns cannot be used in discovery: {constant}")

    B, converged = _fit_matrix(d.values, cfg, cfg.seed)
    if not converged:
        warnings.warn(
            "ICA did not converge within ica_max_iter; using the last iterate",
            RuntimeWarning,
            stacklevel=2,
        )
    provenance = {
        "method": cfg.method,
        "config": cfg.to_dict(),
        "converged": converged,
        "n_rows": d.rows,
    }
    return CausalGraph.from_matrix(d.variables, B, provenance=provenance)
