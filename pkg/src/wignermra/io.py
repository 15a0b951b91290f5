"""Deterministic file output: grids with sidecar headers, plot scripts, field archives."""

from __future__ import annotations

import hashlib
import io
import json
import zipfile
from pathlib import Path

import numpy as np

from .mra.basis import CoefficientField, MraBasis, grid, synthesize

__all__ = ["save_npz", "load_npz", "save_field", "load_field", "write_grid", "write_text",
           "write_json", "sha256_file"]

_EPOCH = (1980, 1, 1, 0, 0, 0)


def save_npz(path, **arrays) -> None:
    """Like :func:`numpy.savez` but byte-reproducible (fixed member timestamps and order)."""
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        for name in sorted(arrays):
            buf = io.BytesIO()
            np.lib.format.write_array(buf, np.asarray(arrays[name]), allow_pickle=False)
            info = zipfile.ZipInfo(name + ".npy", date_time=_EPOCH)
            info.external_attr = 0o644 << 16
            zf.writestr(info, buf.getvalue())


def load_npz(path) -> dict[str, np.ndarray]:
    with np.load(path, allow_pickle=False) as data:
        return {k: data[k] for k in data.files}


def save_field(path, field: CoefficientField, **extra) -> None:
    """Single field archive: wavelet vector plus the basis as JSON text."""
    save_npz(path, vector=field.to_vector(), basis=np.array(json.dumps(field.basis.to_dict(), sort_keys=True)),
             **extra)


def load_field(path) -> CoefficientField:
    data = load_npz(path)
    if "vector" not in data or "basis" not in data:
        raise ValueError(f"{path}: not a field archive (needs 'vector' and 'basis')")
    basis = MraBasis.from_dict(json.loads(str(data["basis"])))
    return CoefficientField.from_vector(basis, data["vector"])


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def write_json(path, obj) -> None:
    write_text(path, json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_grid(stem, field: CoefficientField, *, title: str, hbar: float, resolution: int | None = None,
               extra_header: dict | None = None) -> list[Path]:
    """Write ``stem.dat`` (matrix, rows = q), ``stem.hdr`` and a gnuplot script ``stem.gp``."""
    stem = Path(stem)
    basis = field.basis
    R = resolution or basis.size
    W = np.real(synthesize(field, R))
    qs, ps = grid(basis, R)
    dat, hdr, gp = stem.with_suffix(".dat"), stem.with_suffix(".hdr"), stem.with_suffix(".gp")
    np.savetxt(dat, W, fmt="%.10e")
    header = {
        "title": title,
        "rows": f"q from {qs[0]:.6g} step {qs[1] - qs[0]:.6g} count {R}",
        "columns": f"p from {ps[0]:.6g} step {ps[1] - ps[0]:.6g} count {R}",
        "levels": f"{basis.coarsest}..{basis.finest}",
        "wavelet_order": basis.family.order,
        "hbar": f"{hbar:.12g}",
        "min": f"{W.min():.10e}",
        "max": f"{W.max():.10e}",
    }
    header.update(extra_header or {})
    write_text(hdr, "".join(f"{k}: {v}\n" for k, v in header.items()))
    dq, dp = qs[1] - qs[0], ps[1] - ps[0]
    script = "\n".join([
        f"# {title}",
        "set terminal pngcairo size 800,700",
        f"set output '{stem.name}.png'",
        "set view map",
        "set size ratio -1",
        "set xlabel 'q'",
        "set ylabel 'p'",
        "set palette defined (-1 'blue', 0 'white', 1 'red')",
        f"set cbrange [{-max(abs(W.min()), abs(W.max())):.6g}:{max(abs(W.min()), abs(W.max())):.6g}]",
        f"set title '{title}'",
        f"plot '{dat.name}' matrix using ({qs[0]:.6g}+$2*{dq:.6g}):({ps[0]:.6g}+$1*{dp:.6g}):3 with image notitle",
        "",
    ])
    write_text(gp, script)
    return [dat, hdr, gp]


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
