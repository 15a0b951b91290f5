"""Command line driver.

Subcommands ``star-check``, ``spectrum``, ``evolve`` and ``analyze`` each
write their artifacts plus a ``manifest.json`` (configuration, seed,
library versions and SHA-256 of every output) into the output directory.

Exit status: 0 on success, 1 for invalid input or a failed property check,
2 for a numerical failure (eigensolver, residual filter, instability).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import platform
import sys
from pathlib import Path

import numpy as np
import scipy
import scipy.sparse.linalg
import sympy

from . import __version__
from .checks import broken_star, star_property_suite
from .config import ConfigError, RunConfig, load_config
from .diagnostics import report
from .io import load_field, save_field, save_npz, sha256_file, write_grid, write_json, write_text
from .mra.basis import CoefficientField, synthesize
from .solver.evolution import InstabilityError, coherent_state, evolve, rotated_coherent_state
from .solver.multiscale import InsufficientSamplesError, slow_fast_split
from .solver.stationary import EigensolverError, NoPhysicalModesError, solve_stationary, superpose_modes

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_FAILURE", "EXIT_NUMERICAL"]

log = logging.getLogger("wignermra")

EXIT_OK, EXIT_FAILURE, EXIT_NUMERICAL = 0, 1, 2
NUMERICAL_ERRORS = (NoPhysicalModesError, EigensolverError, InstabilityError, np.linalg.LinAlgError,
                    scipy.sparse.linalg.ArpackError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAILURE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI configuration or a manifest.json to re-run")
    common.add_argument("--out", type=Path, help="output directory (overrides [output] directory)")
    common.add_argument("--seed", type=int, help="random seed (default 0, or the manifest's seed)")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = _Parser(prog="wignermra", description="Wavelet-Galerkin Wigner solver")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    star = sub.add_parser("star-check", parents=[common], help="star-product property suite")
    star.add_argument("--broken-kernel", action="store_true", help=argparse.SUPPRESS)
    sub.add_parser("spectrum", parents=[common], help="stationary eigenmodes")
    sub.add_parser("evolve", parents=[common], help="time evolution of a coherent state")
    an = sub.add_parser("analyze", parents=[common], help="diagnostics of field archives")
    an.add_argument("inputs", nargs="*", help="field archives (.npz) or 'random'")
    return parser


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_star_check(cfg: RunConfig, seed: int, out: Path, *, broken: bool = False) -> tuple[int, list[Path]]:
    sc = cfg.star_check
    rep = star_property_suite(sc.n_triples, sc.max_degree, tuple(sc.hbar_values()), seed=seed,
                              float_tol=sc.float_tol, exact=sc.exact, star=broken_star if broken else None)
    path = out / "star_check.txt"
    write_text(path, rep.to_text())
    for o in rep.outcomes:
        log.info("%s: %d/%d passed (max error %.2e)", o.name, o.count - o.failures, o.count, o.max_error)
    if not rep.passed:
        log.error("star-product property suite FAILED")
    return (EXIT_OK if rep.passed else EXIT_FAILURE), [path]


def _grid_res(cfg: RunConfig, basis) -> int:
    return cfg.output.grid_resolution or basis.size


def _mode_header(energy, residual):
    return {"energy": f"{energy:.12g}", "imag_residual": f"{residual:.6e}"}


def cmd_spectrum(cfg: RunConfig, seed: int, out: Path) -> tuple[int, list[Path]]:
    H, basis = cfg.hamiltonian.build(), cfg.basis.build()
    s = cfg.solver
    modes = solve_stationary(H, basis, s.n_modes, tau=s.tau, cluster_gap=s.cluster_gap, seed=seed)
    files: list[Path] = []
    th, res = cfg.diagnostics.thresholds(), cfg.diagnostics.resolution or None
    lines = ["# n energy imag_residual integral"]
    for n, m in enumerate(modes):
        lines.append(f"{n} {m.energy:.12f} {m.imag_residual:.6e} {m.normalization:.12e}")
    if len(modes) < s.n_modes:
        lines.append(f"# only {len(modes)} of {s.n_modes} requested modes passed the residual filter")
    write_text(out / "eigenvalues.txt", "\n".join(lines) + "\n")
    files.append(out / "eigenvalues.txt")
    modes.save(out / "modes")
    files += [out / "modes.npz", out / "modes.json"]
    records = []
    for n, m in enumerate(modes):
        stem = out / f"mode_{n:02d}"
        W = m.wigner()
        files += write_grid(stem, W, title=f"mode {n}, energy {m.energy:.6f}", hbar=H.hbar,
                            resolution=_grid_res(cfg, basis), extra_header=_mode_header(m.energy, m.imag_residual))
        save_field(stem.with_suffix(".npz"), W)
        rep = report(W, H.hbar, thresholds=th, resolution=res)
        write_text(stem.with_suffix(".report.txt"), rep.to_text())
        rec = dict(rep.to_record(), mode=n, energy=m.energy, imag_residual=m.imag_residual)
        records.append(rec)
        write_json(stem.with_suffix(".report.json"), rec)
        files += [stem.with_suffix(s_) for s_ in (".npz", ".report.txt", ".report.json")]
    if len(modes) > 1:
        weights = cfg.superposition.values(len(modes))
        if len(weights) > len(modes):
            raise ConfigError(f"{len(weights)} superposition weights for {len(modes)} modes")
        sup = superpose_modes(modes, weights)
        integral = sum(w * m.normalization for w, m in zip(weights, modes))
        stem = out / "superposition"
        files += write_grid(stem, sup, title=f"superposition of {len(weights)} modes", hbar=H.hbar,
                            resolution=_grid_res(cfg, basis),
                            extra_header={"weights": " ".join(f"{w:.12g}" for w in weights),
                                          "integral": f"{integral:.12g}"})
        save_field(stem.with_suffix(".npz"), sup)
        rep = report(sup, H.hbar, thresholds=th, resolution=res)
        write_text(stem.with_suffix(".report.txt"), rep.to_text())
        files += [stem.with_suffix(".npz"), stem.with_suffix(".report.txt")]
    write_json(out / "mode_reports.json", records)
    files.append(out / "mode_reports.json")
    log.info("energies: %s", " ".join(f"{e:.6f}" for e in modes.energies))
    return EXIT_OK, files


def _oscillator_frequency(cfg: RunConfig) -> float | None:
    """Frequency when H = p^2/2m + (m w^2/2) q^2, else None."""
    hc = cfg.hamiltonian
    if hc.symbol.strip():
        return None
    U = hc.build().potential
    terms = dict(U.terms)
    if set(terms) != {(2, 0)}:
        return None
    k = complex(terms[(2, 0)]) if not U.exact else complex(U.to_float().terms[(2, 0)])
    if k.imag != 0 or k.real <= 0:
        return None
    return math.sqrt(2.0 * k.real / hc.mass)


def cmd_evolve(cfg: RunConfig, seed: int, out: Path) -> tuple[int, list[Path]]:
    H, basis = cfg.hamiltonian.build(), cfg.basis.build()
    s = cfg.solver
    omega = _oscillator_frequency(cfg) or 1.0
    W0 = coherent_state(basis, s.q0, s.p0, H.hbar, H.mass, omega)
    traj = evolve(W0, H, s.t_end, s.dt, snapshot_every=s.snapshot_every)
    files: list[Path] = []
    write_text(out / "conservation.txt", traj.conservation_table())
    files.append(out / "conservation.txt")
    save_npz(out / "snapshots.npz", times=np.array(traj.times), vectors=traj.vectors())
    files.append(out / "snapshots.npz")
    R = _grid_res(cfg, basis)
    files += write_grid(out / "initial", traj.fields[0], title="initial field", hbar=H.hbar, resolution=R)
    files += write_grid(out / "final", traj.fields[-1], title=f"field at t={traj.times[-1]:.6g}",
                        hbar=H.hbar, resolution=R)
    save_field(out / "final.npz", traj.fields[-1])
    files.append(out / "final.npz")
    S0, S1 = synthesize(traj.fields[0], R), synthesize(traj.fields[-1], R)
    summary = {
        "steps": traj.metadata["steps"],
        "dt": traj.metadata["dt"],
        "t_end": traj.times[-1],
        "snapshots": len(traj),
        "max_integral_drift": traj.max_drift,
        "final_vs_initial_max_error": float(np.abs(S1 - S0).max()),
    }
    if _oscillator_frequency(cfg) is not None:
        exact = rotated_coherent_state(basis, traj.times[-1], s.q0, s.p0, H.hbar, H.mass, omega)
        summary["final_vs_transport_max_error"] = float(np.abs(S1 - synthesize(exact, R)).max())
    split = cfg.split
    try:
        sf_traj = traj.uniform()
        sf = slow_fast_split(sf_traj, split.N, split.M)
    except InsufficientSamplesError as exc:
        write_text(out / "slowfast.txt", f"# slow/fast split skipped: {exc}\n")
        summary["slowfast"] = "skipped"
    else:
        err_s = max(float(np.abs((a - b).to_vector()).max()) for a, b in zip(sf.spatial_reconstruction(), sf_traj.fields))
        err_t = max(float(np.abs((a - b).to_vector()).max()) for a, b in zip(sf.temporal_reconstruction(), sf_traj.fields))
        write_text(out / "slowfast.txt", sf.summary()
                   + f"# reconstruction_error spatial {err_s:.3e} temporal {err_t:.3e}\n")
        summary["slowfast_reconstruction_error"] = max(err_s, err_t)
    files.append(out / "slowfast.txt")
    write_text(out / "evolution_summary.txt", "".join(f"{k}: {v}\n" for k, v in summary.items()))
    files.append(out / "evolution_summary.txt")
    log.info("evolved %d steps; drift %.2e", summary["steps"], summary["max_integral_drift"])
    return EXIT_OK, files


def _random_field(cfg: RunConfig, seed: int) -> CoefficientField:
    basis = cfg.basis.build()
    vec = np.random.default_rng(seed).standard_normal(basis.dim)
    return CoefficientField.from_vector(basis, vec / np.linalg.norm(vec))


def cmd_analyze(cfg: RunConfig, seed: int, out: Path, inputs: list[str]) -> tuple[int, list[Path]]:
    if not inputs:
        raise UsageError("analyze needs at least one input field (archive path or 'random')")
    th, res = cfg.diagnostics.thresholds(), cfg.diagnostics.resolution or None
    files, rows = [], []
    used = set()
    for item in inputs:
        if item == "random":
            field, name = _random_field(cfg, seed), "random"
        else:
            path = Path(item)
            if not path.is_file():
                raise UsageError(f"input not found: {item}")
            field, name = load_field(path), path.stem
        base = name
        k = 1
        while name in used:
            k += 1
            name = f"{base}_{k}"
        used.add(name)
        rep = report(field, cfg.hamiltonian.hbar, thresholds=th, resolution=res)
        write_text(out / f"{name}.report.txt", rep.to_text())
        write_json(out / f"{name}.report.json", rep.to_record())
        files += [out / f"{name}.report.txt", out / f"{name}.report.json"]
        purity = "nan" if rep.purity is None else f"{rep.purity:.6f}"
        rows.append(f"{name} {rep.label} {rep.coefficient_entropy:.6f} {rep.participation_ratio:.3f} "
                    f"{purity} {rep.negativity:.6f} {rep.norm:.6f}")
    table = "# name label entropy participation_ratio purity negativity norm\n" + "\n".join(rows) + "\n"
    write_text(out / "comparison.txt", table)
    files.append(out / "comparison.txt")
    return EXIT_OK, files


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def _versions() -> dict:
    return {"wignermra": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "sympy": sympy.__version__}


def _manifest(command, cfg, seed, out: Path, files, status, inputs=None) -> Path:
    outputs = {}
    for f in sorted(set(files)):
        outputs[str(f.relative_to(out))] = sha256_file(f)
    man = {"command": command, "config": cfg.to_dict(include_output=False), "seed": seed,
           "versions": _versions(), "outputs": outputs, "status": status}
    if inputs is not None:
        man["inputs"] = [i if i == "random" else {"name": Path(i).name, "sha256": sha256_file(i)} for i in inputs]
    path = out / "manifest.json"
    write_json(path, man)
    return path


def _manifest_seed(path: Path | None) -> int | None:
    if path is None or path.suffix != ".json":
        return None
    try:
        return json.loads(path.read_text()).get("seed")
    except (OSError, ValueError):
        return None


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else (_manifest_seed(args.config) or 0)
        out = Path(args.out or cfg.output.directory)
        out.mkdir(parents=True, exist_ok=True)
        inputs = None
        if args.command == "star-check":
            status, files = cmd_star_check(cfg, seed, out, broken=args.broken_kernel)
        elif args.command == "spectrum":
            status, files = cmd_spectrum(cfg, seed, out)
        elif args.command == "evolve":
            status, files = cmd_evolve(cfg, seed, out)
        else:
            inputs = args.inputs
            status, files = cmd_analyze(cfg, seed, out, inputs)
        _manifest(args.command, cfg, seed, out, files, status, inputs)
        return status
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"wignermra: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except NUMERICAL_ERRORS as exc:
        print(f"wignermra: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError) as exc:
        print(f"wignermra: invalid input: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
