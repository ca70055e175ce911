"""Parameter sweeps over the deformed and biased CHSH families.

Each scan fixes Alice's observables to the Pauli pair (sigma_X, y sigma_Y)
and sweeps the game parameters, recording the game-locality norm, the
compatibility norm and their ratio.  CSV and self-contained SVG emitters
render the violation regions and norm curves.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor

from .bellnorm import m_bell_norm
from .errors import ValidationError
from .games import biased_chsh, classical_bias, deformed_chsh, normalize
from .measurements import MeasurementTuple, PAULI_X, PAULI_Y

DEFORMED_FIELDS = ("y", "t", "norm_m", "norm_c", "ratio", "violated",
                   "invertible")
BIASED_FIELDS = ("y", "p", "q", "norm_g", "norm_c", "ratio", "violated",
                 "invertible")

DEFAULT_Y_GRID = [round(-1.0 + 0.01 * k, 10) for k in range(201)]
DEFAULT_T_CURVES = [-4.0, -2.0, 0.0, 0.5, 1.0, 2.0, 4.0]
DEFAULT_T_REGION = [round(-4.0 + 0.02 * k, 10) for k in range(401)]


def thread_count() -> int:
    """Worker count from BELLTENSOR_THREADS, capped at the CPU count."""
    raw = os.environ.get("BELLTENSOR_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"BELLTENSOR_THREADS must be an integer, got {raw!r}")
    return max(1, min(n, os.cpu_count() or 1))


def _map_ordered(fn, items):
    workers = thread_count()
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --- closed forms ------------------------------------------------------------

def deformed_closed_form(y: float, t: float) -> float:
    """Game-locality norm of (sigma_X, y sigma_Y) for the normalized
    deformed-CHSH game: (sqrt(1+(yt)^2) + sqrt(1+y^2)) / (2+|t-1|)."""
    return (math.hypot(1.0, y * t) + math.hypot(1.0, y)) / (2.0 + abs(t - 1.0))


def biased_closed_form(y: float, p: float, q: float) -> float:
    """Game-locality norm of (sigma_X, y sigma_Y) for the normalized biased
    game G(p, q)."""
    num = (math.hypot(p * q, y * q * (1.0 - p))
           + math.hypot(p * (1.0 - q), y * (1.0 - p) * (1.0 - q)))
    den = abs(1.0 - 2.0 * min(p, 1.0 - p) * min(q, 1.0 - q))
    return num / den


def pauli_pair_compat_norm(y: float) -> float:
    """Compatibility norm of (sigma_X, y sigma_Y): sqrt(1 + y^2)."""
    return math.hypot(1.0, y)


def deformed_violation_threshold() -> float:
    """Smallest t at which (sigma_X, sigma_Y) violates the normalized
    deformed-CHSH inequality: (9 - 4 sqrt 2)/7."""
    return (9.0 - 4.0 * math.sqrt(2.0)) / 7.0


# --- scans -------------------------------------------------------------------

def _pauli_pair(y: float) -> MeasurementTuple:
    return MeasurementTuple([PAULI_X, float(y) * PAULI_Y])


def scan_deformed_chsh(y_grid=None, t_grid=None) -> list[dict]:
    """Sweep (y, t); one record per grid point in row-major (y, t) order."""
    y_grid = DEFAULT_Y_GRID if y_grid is None else list(y_grid)
    t_grid = DEFAULT_T_REGION if t_grid is None else list(t_grid)
    if not y_grid or not t_grid:
        raise ValidationError("scan grids must be non-empty")

    games = [normalize(deformed_chsh(t)) for t in t_grid]

    def row(y: float) -> list[dict]:
        A = _pauli_pair(y)
        nc = pauli_pair_compat_norm(y)
        out = []
        for t, game in zip(t_grid, games):
            nm = m_bell_norm(A, game)
            out.append({
                "y": float(y), "t": float(t),
                "norm_m": nm, "norm_c": nc, "ratio": nm / nc,
                "violated": nm > 1.0, "invertible": game.invertible,
            })
        return out

    return [rec for chunk in _map_ordered(row, y_grid) for rec in chunk]


def scan_biased_chsh(y_grid=None, p_grid=None, q_grid=None) -> list[dict]:
    """Sweep (y, p, q); one record per grid point in row-major order."""
    y_grid = DEFAULT_Y_GRID if y_grid is None else list(y_grid)
    p_grid = [round(0.05 * k, 10) for k in range(21)] if p_grid is None else list(p_grid)
    q_grid = [round(0.05 * k, 10) for k in range(21)] if q_grid is None else list(q_grid)
    if not y_grid or not p_grid or not q_grid:
        raise ValidationError("scan grids must be non-empty")

    games = [(p, q, normalize(biased_chsh(p, q)))
             for p in p_grid for q in q_grid]

    def row(y: float) -> list[dict]:
        A = _pauli_pair(y)
        nc = pauli_pair_compat_norm(y)
        out = []
        for p, q, game in games:
            ng = m_bell_norm(A, game)
            out.append({
                "y": float(y), "p": float(p), "q": float(q),
                "norm_g": ng, "norm_c": nc, "ratio": ng / nc,
                "violated": ng > 1.0, "invertible": game.invertible,
            })
        return out

    return [rec for chunk in _map_ordered(row, y_grid) for rec in chunk]


# --- emitters ----------------------------------------------------------------

def _fields(grid) -> tuple:
    if not grid:
        raise ValidationError("cannot emit an empty grid")
    return DEFORMED_FIELDS if "t" in grid[0] else BIASED_FIELDS


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return "%.12g" % v


def emit_csv(grid, path: str):
    """Write scan records as UTF-8 CSV, 12 significant digits."""
    fields = _fields(grid)
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(fields)
            for rec in grid:
                writer.writerow([_fmt(rec[f]) for f in fields])
    except OSError as exc:
        raise ValidationError(f"cannot write CSV to {path!r}: {exc}") from exc


_SVG_W, _SVG_H, _MARGIN = 640, 480, 48


def _axis_transform(values, lo_px, hi_px):
    vmin, vmax = min(values), max(values)
    span = vmax - vmin or 1.0
    return lambda v: lo_px + (v - vmin) / span * (hi_px - lo_px)


def _svg_header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" '
        f'height="{_SVG_H}" viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<text x="{_SVG_W // 2}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
    ]


def _region_svg(grid, fields) -> list[str]:
    # Horizontal axis: the game parameter (t or p); vertical: y (or q).
    if "t" in grid[0]:
        ax, ay, title = "t", "y", "Violation region (deformed CHSH)"
    else:
        ax, ay, title = "p", "q", "Violation region (biased CHSH)"
    xs = sorted({rec[ax] for rec in grid})
    ys = sorted({rec[ay] for rec in grid})
    tx = _axis_transform(xs, _MARGIN, _SVG_W - _MARGIN)
    ty = _axis_transform(ys, _SVG_H - _MARGIN, _MARGIN)
    cw = (_SVG_W - 2 * _MARGIN) / max(1, len(xs) - 1)
    ch = (_SVG_H - 2 * _MARGIN) / max(1, len(ys) - 1)
    out = _svg_header(title)
    for rec in grid:
        if not rec["violated"]:
            continue
        x = tx(rec[ax]) - cw / 2
        y = ty(rec[ay]) - ch / 2
        out.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw:.2f}" '
                   f'height="{ch:.2f}" fill="#c23b22"/>')
    out.append(f'<rect x="{_MARGIN}" y="{_MARGIN}" '
               f'width="{_SVG_W - 2 * _MARGIN}" height="{_SVG_H - 2 * _MARGIN}" '
               f'fill="none" stroke="black"/>')
    return out


_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _curves_svg(grid, fields) -> list[str]:
    # One polyline per game-parameter combination, norm against y.
    value_field = "norm_m" if "norm_m" in grid[0] else "norm_g"
    params = fields[1:fields.index(value_field)]
    groups: dict[tuple, list] = {}
    for rec in grid:
        groups.setdefault(tuple(rec[p] for p in params), []).append(rec)
    ys = [rec["y"] for rec in grid]
    vals = [rec[value_field] for rec in grid]
    tx = _axis_transform(ys, _MARGIN, _SVG_W - _MARGIN)
    tv = _axis_transform(vals + [1.0], _SVG_H - _MARGIN, _MARGIN)
    out = _svg_header(f"{value_field} against y")
    y1 = tv(1.0)
    out.append(f'<line x1="{_MARGIN}" y1="{y1:.2f}" x2="{_SVG_W - _MARGIN}" '
               f'y2="{y1:.2f}" stroke="#999" stroke-dasharray="4 3"/>')
    for i, (key, recs) in enumerate(sorted(groups.items())):
        recs = sorted(recs, key=lambda r: r["y"])
        pts = " ".join(f"{tx(r['y']):.2f},{tv(r[value_field]):.2f}" for r in recs)
        color = _PALETTE[i % len(_PALETTE)]
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        label = ", ".join(f"{p}={v:g}" for p, v in zip(params, key))
        out.append(f'<text x="{_SVG_W - _MARGIN + 4}" y="{_MARGIN + 14 * i + 10}" '
                   f'font-family="sans-serif" font-size="10" '
                   f'fill="{color}">{label}</text>')
    out.append(f'<rect x="{_MARGIN}" y="{_MARGIN}" '
               f'width="{_SVG_W - 2 * _MARGIN}" height="{_SVG_H - 2 * _MARGIN}" '
               f'fill="none" stroke="black"/>')
    return out


def emit_svg(grid, path: str, kind: str = "region"):
    """Render a scan as a self-contained SVG: a filled violation region or
    one norm curve per game-parameter combination."""
    fields = _fields(grid)
    if kind == "region":
        parts = _region_svg(grid, fields)
    elif kind == "curves":
        parts = _curves_svg(grid, fields)
    else:
        raise ValidationError(f"unknown plot kind {kind!r}; "
                              "expected 'region' or 'curves'")
    parts.append("</svg>")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(parts) + "\n")
    except OSError as exc:
        raise ValidationError(f"cannot write SVG to {path!r}: {exc}") from exc
