"""
Binary snapshot files and run manifests.

Layout (little-endian throughout)::

    offset  size     field
    0       4        magic b"NSEF"
    4       4        format version (u32)
    8       4        n (u32)
    12      8        box_length (f64)
    20      8        nu (f64)
    28      8        t (f64)
    36      24 n^3   u_1, u_2, u_3 in turn, each n^3 f64 values, x fastest

A run directory holds one file per snapshot plus ``manifest.json`` listing
every file with its time.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
import struct

import numpy as np

from .solver import SCHEMES, Snapshot, SolverConfig, Trajectory
from .spectral import Grid, curl, fft_forward, fft_inverse

__all__ = [
    "MAGIC",
    "VERSION",
    "HEADER",
    "SnapshotFormatError",
    "BadMagicError",
    "TruncatedError",
    "VersionMismatchError",
    "ManifestError",
    "snapshot_nbytes",
    "write_snapshot",
    "read_snapshot",
    "write_run",
    "read_run",
]

MAGIC = b"NSEF"
VERSION = 1
HEADER = struct.Struct("<4sII3d")
MANIFEST = "manifest.json"


class SnapshotFormatError(ValueError):
    """Malformed snapshot file; ``code`` identifies the failure."""

    code = "format"

    def __init__(self, path, detail: str):
        super().__init__(f"{path}: {self.code}: {detail}")
        self.path = path


class BadMagicError(SnapshotFormatError):
    code = "bad-magic"


class TruncatedError(SnapshotFormatError):
    code = "truncated"


class VersionMismatchError(SnapshotFormatError):
    code = "version-mismatch"


class ManifestError(ValueError):
    """Missing, inconsistent or gapped run manifest."""


def snapshot_nbytes(n: int) -> int:
    return HEADER.size + 24 * n**3


def write_snapshot(snap: Snapshot, path) -> None:
    grid = snap.grid
    header = HEADER.pack(MAGIC, VERSION, grid.n, grid.box_length, grid.nu, snap.t)
    # x fastest: Fortran order of the (ix, iy, iz) array
    body = b"".join(np.asarray(c, dtype="<f8").tobytes(order="F") for c in snap.u)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)


def read_snapshot(path) -> Snapshot:
    """
    Read a snapshot written by :func:`write_snapshot`.

    The velocity comes back bit-identical; the vorticity is recomputed.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 4:
        raise TruncatedError(path, f"{len(data)} bytes, shorter than the magic number")
    if data[:4] != MAGIC:
        raise BadMagicError(path, f"expected {MAGIC!r}, found {data[:4]!r}")
    if len(data) < HEADER.size:
        raise TruncatedError(path, f"{len(data)} bytes, shorter than the {HEADER.size}-byte header")
    _, version, n, box_length, nu, t = HEADER.unpack_from(data)
    if version != VERSION:
        raise VersionMismatchError(path, f"format version {version}, reader supports {VERSION}")
    expected = snapshot_nbytes(n)
    if len(data) < expected:
        raise TruncatedError(path, f"{len(data)} bytes, expected {expected} for n={n}")
    if len(data) > expected:
        raise SnapshotFormatError(path, f"{len(data)} bytes, expected {expected} for n={n}")
    grid = Grid(n, box_length, nu)
    values = np.frombuffer(data, dtype="<f8", offset=HEADER.size).astype(np.float64)
    u = np.stack([c.reshape((n, n, n), order="F") for c in values.reshape(3, n**3)])
    u = np.ascontiguousarray(u)
    omega = fft_inverse(curl(fft_forward(u), grid), grid)
    u.setflags(write=False)
    omega.setflags(write=False)
    return Snapshot(float(t), u, omega, grid)


def _snapshot_name(i: int) -> str:
    return f"snap_{i:06d}.nsef"


def write_run(traj: Trajectory, directory) -> Path:
    """Write every snapshot and ``manifest.json``; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    cfg = traj.config
    entries = []
    for i, snap in enumerate(traj.snapshots):
        name = _snapshot_name(i)
        write_snapshot(snap, directory / name)
        entries.append({"index": i, "t": snap.t, "file": name})
    manifest = {
        "format_version": VERSION,
        "n": cfg.grid.n,
        "box_length": cfg.grid.box_length,
        "nu": cfg.grid.nu,
        "dt": cfg.dt,
        "t_end": cfg.t_end,
        "snapshot_interval": cfg.snapshot_interval,
        "scheme": cfg.scheme,
        "status": traj.status,
        "message": traj.message,
        "snapshots": entries,
    }
    path = directory / MANIFEST
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, path)
    return path


def _check_gaps(entries: list[dict], interval: float, t_end: float, path) -> None:
    if not entries:
        raise ManifestError(f"{path}: manifest lists no snapshots")
    for k, e in enumerate(entries):
        if e.get("index") != k:
            raise ManifestError(f"{path}: snapshot index {e.get('index')} at position {k}")
    times = [float(e["t"]) for e in entries]
    if abs(times[0]) > 1e-12:
        raise ManifestError(f"{path}: first snapshot at t={times[0]}, expected 0")
    tol = 1e-9 * max(1.0, t_end)
    for a, b in zip(times[:-1], times[1:]):
        step = b - a
        last = b == times[-1] and abs(b - t_end) <= tol
        if abs(step - interval) > tol and not (last and 0 < step < interval):
            raise ManifestError(f"{path}: gap between snapshots at t={a:.6g} and t={b:.6g}")


def read_run(directory) -> Trajectory:
    """Load a run directory, refusing manifests with missing or gapped snapshots."""
    directory = Path(directory)
    path = directory / MANIFEST
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON ({exc})") from None
    try:
        grid = Grid(int(manifest["n"]), float(manifest["box_length"]), float(manifest["nu"]))
        scheme = manifest.get("scheme", SCHEMES[0])
        cfg = SolverConfig(grid, float(manifest["dt"]), float(manifest["t_end"]),
                           float(manifest["snapshot_interval"]), scheme)
        entries = manifest["snapshots"]
    except (KeyError, TypeError) as exc:
        raise ManifestError(f"{path}: missing or malformed field {exc}") from None
    _check_gaps(entries, cfg.snapshot_interval, cfg.t_end, path)
    snaps = []
    for e in entries:
        snap = read_snapshot(directory / e["file"])
        if snap.grid != grid:
            raise ManifestError(f"{e['file']}: grid {snap.grid} differs from manifest {grid}")
        if abs(snap.t - float(e["t"])) > 1e-12 * max(1.0, snap.t):
            raise ManifestError(f"{e['file']}: time {snap.t} differs from manifest {e['t']}")
        snaps.append(snap)
    return Trajectory(cfg, snaps, manifest.get("status", "complete"), manifest.get("message", ""))
