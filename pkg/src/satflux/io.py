"""Run-directory layout, CSV/JSON writers and a minimal SVG polyline plotter.

Layout of a run directory::

    metadata.json          config, params, termination, snapshot index
    diagnostics.csv        one DiagnosticsRow per snapshot
    snapshots/snap_NNNNN.csv   eta,v
    plots/*.svg            optional

Every file is written to a temporary sibling and moved into place with
``os.replace``. Floats use 17 significant digits so values round-trip
bit-for-bit.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import InsufficientDataError
from .fronts import FrontState
from .solver import DiagnosticsRow, DualState, ModelParams, SchemeConfig, Trajectory

SNAP_DIR = "snapshots"


def fmt(x) -> str:
    return format(float(x), ".17g")


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows) -> Path:
    return atomic_write_text(path, csv_text(header, rows))


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def write_json(path, obj) -> Path:
    return atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# runs


def write_run(traj: Trajectory, out_dir, run_config: dict | None = None) -> Path:
    """Write snapshots, diagnostics and metadata; returns the directory."""
    out = Path(out_dir)
    snaps = []
    for k, s in enumerate(traj.states):
        name = f"{SNAP_DIR}/snap_{k:05d}.csv"
        write_csv(out / name, ("eta", "v"), zip(s.eta, s.v))
        snaps.append({"file": name, "t": s.t})
    write_csv(out / "diagnostics.csv", DiagnosticsRow.COLUMNS, (r.values() for r in traj.rows))
    meta = {
        "params": traj.params.to_dict(),
        "scheme": traj.config.to_dict(),
        "termination": traj.termination,
        "termination_time": traj.termination_time,
        "run": traj.meta,
        "snapshots": snaps,
    }
    if run_config is not None:
        meta["config"] = run_config
    write_json(out / "metadata.json", meta)
    return out


def read_run(run_dir) -> Trajectory:
    """Rebuild a trajectory from a run directory (values as stored on disk)."""
    from .config import flux_from_dict

    run_dir = Path(run_dir)
    try:
        meta = json.loads((run_dir / "metadata.json").read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise InsufficientDataError(f"{run_dir} has no metadata.json") from exc
    pd = meta["params"]
    params = ModelParams(a=pd["a"], m=pd["m"], M=pd["M"], flux=flux_from_dict(pd["flux"]))
    config = SchemeConfig(**meta["scheme"])
    header, diag = read_csv(run_dir / "diagnostics.csv")
    col = {h: i for i, h in enumerate(header)}
    traj = Trajectory(params=params, config=config, termination=meta["termination"],
                      termination_time=meta["termination_time"], meta=meta.get("run", {}))
    for k, snap in enumerate(meta["snapshots"]):
        _, data = read_csv(run_dir / snap["file"])
        traj.states.append(DualState(snap["t"], params, data[:, 1]))
        row = diag[k]
        traj.fronts.append(FrontState(snap["t"], row[col["sigma_minus"]], row[col["sigma_plus"]]))
        traj.rows.append(DiagnosticsRow(*row))
    return traj


# ---------------------------------------------------------------------------
# traveling waves


def write_profile(profile, path) -> tuple[Path, Path]:
    """``kappa,U,xi`` CSV plus a JSON sidecar with the same stem."""
    path = Path(path)
    csv_path = write_csv(path, ("kappa", "U", "xi"), zip(profile.kappa, profile.U, profile.xi))
    side = {
        "kind": profile.kind, "sigma": profile.sigma, "kappa_bar": profile.kappa_bar,
        "tau": profile.tau, "v_edge": profile.v_edge, "M": profile.M, "a": profile.params.a,
        "m": profile.params.m, "flux": profile.params.flux.to_dict(), "K_const": profile.K_const,
        "entropic": profile.entropic, "residual": profile.residual,
        "ell": profile.ell, "mass_trapezoid": profile.mass_trapezoid(),
    }
    json_path = write_json(path.with_suffix(".json"), side)
    return csv_path, json_path


# ---------------------------------------------------------------------------
# svg

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def svg_polylines(series, title: str = "", xlabel: str = "", ylabel: str = "") -> str:
    """Self-contained SVG (800x500 viewBox) with one polyline per ``(x, y, label)``."""
    W, H, L, R, T, B = 800, 500, 70, 20, 40, 50
    xs = np.concatenate([np.asarray(s[0], float) for s in series]) if series else np.zeros(1)
    ys = np.concatenate([np.asarray(s[1], float) for s in series]) if series else np.zeros(1)
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = float(np.min(ys)), float(np.max(ys))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(x):
        return L + (np.asarray(x, float) - x0) / (x1 - x0) * (W - L - R)

    def py(y):
        return H - B - (np.asarray(y, float) - y0) / (y1 - y0) * (H - T - B)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}">',
           f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
           f'<rect x="{L}" y="{T}" width="{W - L - R}" height="{H - T - B}" fill="none" stroke="#444"/>']
    for frac in (0.0, 0.5, 1.0):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        out.append(f'<text x="{px(xv):.2f}" y="{H - B + 18}" font-size="12" text-anchor="middle">{xv:.4g}</text>')
        out.append(f'<text x="{L - 6}" y="{py(yv):.2f}" font-size="12" text-anchor="end">{yv:.4g}</text>')
    if title:
        out.append(f'<text x="{W / 2}" y="24" font-size="16" text-anchor="middle">{_esc(title)}</text>')
    if xlabel:
        out.append(f'<text x="{(L + W - R) / 2}" y="{H - 10}" font-size="13" text-anchor="middle">{_esc(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{(T + H - B) / 2}" font-size="13" text-anchor="middle" '
                   f'transform="rotate(-90 16 {(T + H - B) / 2})">{_esc(ylabel)}</text>')
    for k, (x, y, label) in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px(x), py(y)))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}">'
                   f'<title>{_esc(label)}</title></polyline>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_run_plots(traj: Trajectory, out_dir, max_profiles: int = 6) -> list[Path]:
    from .fronts import reconstruct

    out = Path(out_dir) / "plots"
    t = [f.t for f in traj.fronts]
    ell = [f.ell for f in traj.fronts]
    paths = [atomic_write_text(out / "ell.svg",
                               svg_polylines([(t, ell, "ell(t)")], "support length", "t", "ell"))]
    pick = np.unique(np.linspace(0, len(traj.states) - 1, min(max_profiles, len(traj.states))).astype(int))
    series = []
    for k in pick:
        snap = reconstruct(traj.states[k], traj.fronts[k].sigma_minus, traj.fronts[k].sigma_plus)
        series.append((snap.x, snap.u, f"t={snap.t:.4g}"))
    paths.append(atomic_write_text(out / "profiles.svg",
                                   svg_polylines(series, "density snapshots", "x", "u")))
    return paths
