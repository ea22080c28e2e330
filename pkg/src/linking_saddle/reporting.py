"""File outputs: CSV reports, PGM heatmaps, SVG traces, run manifests.

Every writer goes through an atomic temp-file-plus-rename, so a crashed
run never leaves a half-written report. Floats are serialized with 17
significant digits, which round-trips IEEE doubles exactly; determinism
tests compare these files byte for byte.
"""

from __future__ import annotations

import os
import tempfile
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import RunConfig, format_config

__all__ = [
    "format_float",
    "atomic_write_text",
    "write_csv",
    "write_pgm",
    "write_svg_trace",
    "write_manifest",
]


def format_float(x: float) -> str:
    return "%.17g" % float(x)


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def atomic_write_text(path: str, text: str) -> None:
    """Write text then rename into place, so readers never see partial files."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_pgm(path: str, mesh: np.ndarray, comment: str = "") -> None:
    """Plain (P2) grayscale image of a 2D interior mesh, row-major.

    Values are linearly rescaled to 0..255; a constant field maps to
    mid-gray. Only meaningful for 2D fields.
    """
    mesh = np.asarray(mesh, dtype=float)
    if mesh.ndim != 2:
        raise ValueError(f"heatmaps need a 2D mesh, got shape {mesh.shape}")
    lo, hi = float(mesh.min()), float(mesh.max())
    if hi > lo:
        gray = np.rint((mesh - lo) / (hi - lo) * 255.0).astype(int)
    else:
        gray = np.full(mesh.shape, 128, dtype=int)
    lines = ["P2"]
    if comment:
        lines.append("# " + comment)
    lines.append(f"{mesh.shape[1]} {mesh.shape[0]}")
    lines.append("255")
    for row in gray:
        lines.append(" ".join(str(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _polyline(xs: np.ndarray, ys: np.ndarray, color: str) -> str:
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    return f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>'


def write_svg_trace(path: str, energies: Sequence[float], grad_norms: Sequence[float]) -> None:
    """Small static SVG: energy per iterate and log10 gradient norm."""
    width, height, pad = 640, 360, 40
    n = max(len(energies), 2)
    xs = pad + np.arange(len(energies)) * (width - 2 * pad) / (n - 1)

    def scaled(values: np.ndarray) -> np.ndarray:
        lo, hi = float(values.min()), float(values.max())
        if hi <= lo:
            return np.full(values.shape, height / 2.0)
        return height - pad - (values - lo) / (hi - lo) * (height - 2 * pad)

    energy_arr = np.asarray(energies, dtype=float)
    grads = np.log10(np.maximum(np.asarray(grad_norms, dtype=float), 1e-300))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        _polyline(xs, scaled(energy_arr), "#1f77b4"),
        _polyline(xs, scaled(grads), "#d62728"),
        f'<text x="{pad}" y="20" font-size="12" fill="#1f77b4">energy</text>',
        f'<text x="{pad + 70}" y="20" font-size="12" fill="#d62728">log10 gradient</text>',
        "</svg>",
    ]
    atomic_write_text(path, "\n".join(parts) + "\n")


def write_manifest(
    path: str,
    cfg: RunConfig,
    metadata: Mapping[str, str],
    steps: Sequence[tuple[str, str]] = (),
) -> None:
    """Record the exact configuration plus run metadata.

    Metadata and step outcomes ride in comment lines, so the manifest
    body re-parses to a configuration equal to the one that ran.
    """
    lines = ["# run manifest"]
    for key, val in metadata.items():
        lines.append(f"# {key} = {val}")
    for name, outcome in steps:
        lines.append(f"# step {name}: {outcome}")
    text = "\n".join(lines) + "\n" + format_config(cfg)
    atomic_write_text(path, text)
