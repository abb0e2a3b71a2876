"""Bound comparison table for ``A = diag(1, 0, 0)``, ``E = eps * [[1, 1, 0], 0, 0]``.

Rows: exact relative error, the projector-case bound and the leading term
of the first-order rank-case bound; columns: ``eps`` in
``{0.1, 0.01, 0.001, 0.0001}``.

Two sets of values are produced. ``raw`` is full double precision. ``display``
evaluates each row at four-decimal working precision: every intermediate
scalar and matrix entry is rounded with :func:`short` before it is used,
and the result is printed with :func:`format_short` (four decimals, or a
four-decimal mantissa below 1e-3). The reference values are reproduced
cell-for-cell only by the display evaluation; see README.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fixtures import comparison_epsilons, comparison_pair
from .linalg import spectral_norm
from .perturbation import PerturbationPair, bound_case2, bound_case3

__all__ = ["ROWS", "Table", "short", "format_short", "comparison_table"]

ROWS = ("Exact", "(3.5)", "(3.12)")


def short(x: float) -> float:
    """Round to the four-decimal display precision."""
    if x == 0 or abs(x) >= 1e-3:
        return round(x, 4)
    return float(f"{x:.4e}")


def format_short(x: float) -> str:
    if x == 0 or abs(x) >= 1e-3:
        return f"{x:.4f}"
    return f"{x:.4e}"


_short_entries = np.vectorize(lambda z: complex(short(z.real), short(z.imag)), otypes=[complex])


@dataclass
class Table:
    epsilons: list[float]
    raw: dict[str, list[float]]
    display: dict[str, list[str]]

    def csv_rows(self) -> list[list[str]]:
        header = ["row"] + [f"eps={format_short(e) if e < 1e-3 else e}" for e in self.epsilons]
        return [header] + [[name] + self.display[name] for name in ROWS]

    def to_dict(self) -> dict:
        return {"epsilons": list(self.epsilons), "raw": {k: list(v) for k, v in self.raw.items()},
                "display": {k: list(v) for k, v in self.display.items()}}


def _column(eps: float) -> tuple[list[float], list[str]]:
    a, e = comparison_pair(eps)
    pp = PerturbationPair(a, e)
    # The projector-case formula is evaluated even though the projector
    # condition does not hold for this pair; the report notes say so.
    b35 = bound_case2(pp, check_premise=False)[0]
    b312 = bound_case3(pp)[1]
    raw = [pp.relative_error, b35.value, b312.value]

    xs, ys = _short_entries(pp.x), _short_entries(pp.y)
    exact_d = spectral_norm(ys - xs) / spectral_norm(xs)
    g = short(pp.norm_xe)
    b35_d = g / short(1.0 - g)
    b312_d = short(b312.premises["C(A)"]) * short(pp.norm_e) / short(pp.norm_a)
    return raw, [format_short(v) for v in (exact_d, b35_d, b312_d)]


def comparison_table() -> Table:
    eps = comparison_epsilons()
    raw = {name: [] for name in ROWS}
    disp = {name: [] for name in ROWS}
    for ep in eps:
        r, d = _column(ep)
        for name, rv, dv in zip(ROWS, r, d):
            raw[name].append(rv)
            disp[name].append(dv)
    return Table(eps, raw, disp)
