"""Command-line entry point.

Subcommands: fig1 | fig2 | fig3 | fig4 | ed | bethe-solve | sweep | validate.
Flags may also come from a flat key=value config file (--config); explicit
flags override file entries.  Exit codes: 0 success, 1 validation failure,
2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--n", type=int, help="number of sites")
    sp.add_argument("--omega-big", type=float, help="common precession frequency")
    sp.add_argument("--delta-y", type=float, help="uniform detuning spacing")
    sp.add_argument("--omega-file", type=str, help="file with one detuning per line")
    sp.add_argument("--g-plus", type=float, help="transverse coupling rate")
    sp.add_argument("--g-zero", type=float, help="dephasing coupling rate")
    sp.add_argument("--g-grid", type=str, help="comma-separated g_plus values")
    sp.add_argument("--seed", type=int, help="RNG seed (default 12345)")
    sp.add_argument("--out-dir", type=str, help="output directory (default .)")
    sp.add_argument("--format", choices=("csv", "json"), help="table format")
    sp.add_argument("--threads", type=int, help="cap on BLAS threads")
    sp.add_argument("--config", type=str, help="key=value config file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="noisyspins",
        description="Exact-solution toolkit for spins in a common noisy field",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, desc in [
        ("fig1", "spectrum scatter data at random detunings"),
        ("fig2", "maximal-spin root loci data"),
        ("fig3", "decay-rate comparison data"),
        ("fig4", "eigenvalue flow data under detuning translation"),
        ("ed", "dense spectrum at the given parameters"),
        ("bethe-solve", "string-branch roots along a coupling grid"),
        ("sweep", "dominant relaxation rate along a coupling grid"),
        ("validate", "run the acceptance suite"),
    ]:
        sp = sub.add_parser(name, help=desc)
        _add_common(sp)
        if name == "validate":
            sp.add_argument("--only", type=str,
                            help="comma-separated criteria ids (default: all)")
            sp.add_argument("--inject-fault", type=str, default=None,
                            help="negative-control fault (harness self-test)")
        if name == "fig4":
            sp.add_argument("--d-omega-max", type=float, default=None)
        if name == "ed":
            sp.add_argument("--sector", type=int, default=None,
                            help="restrict to one S^z_tot sector")
    return ap


def _read_config(path: str) -> dict:
    values = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {line!r}")
        key, val = line.split("=", 1)
        values[key.strip().replace("-", "_").lstrip("_")] = val.strip()
    return values


_CONFIG_TYPES = {
    "n": int, "omega_big": float, "delta_y": float, "omega_file": str,
    "g_plus": float, "g_zero": float, "g_grid": str, "seed": int,
    "out_dir": str, "format": str, "threads": int, "only": str,
    "d_omega_max": float, "sector": int,
}


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None):
        file_values = _read_config(args.config)
        for key, raw in file_values.items():
            if key not in _CONFIG_TYPES:
                raise ValueError(f"unknown config key {key!r}")
            if getattr(args, key, None) is None:
                setattr(args, key, _CONFIG_TYPES[key](raw))
    return args


def _parse_g_grid(args) -> list[float] | None:
    if getattr(args, "g_grid", None):
        vals = [float(x) for x in args.g_grid.split(",") if x.strip()]
        return sorted(vals, reverse=True)
    return None


def _resolve_omega(args, default_n: int, rng_width: float | None = None):
    """Detunings from file > uniform ladder > seeded uniform draw."""
    import numpy as np

    n = args.n if args.n is not None else default_n
    if args.omega_file:
        omega = tuple(
            float(x) for x in Path(args.omega_file).read_text().split()
        )
        return n if args.n is not None else len(omega), omega[:n] if args.n else omega
    if args.delta_y is not None:
        return n, tuple(args.delta_y * j for j in range(1, n + 1))
    if rng_width is not None:
        rng = np.random.default_rng(args.seed if args.seed is not None else 12345)
        return n, tuple(rng.uniform(-rng_width, rng_width, n))
    return n, tuple(0.0 for _ in range(n))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args = _merge_config(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "threads", None):
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(args.threads))
    seed = args.seed if args.seed is not None else 12345
    out_dir = Path(args.out_dir or ".")
    fmt = args.format or "csv"

    from .errors import NoisySpinsError

    try:
        return _dispatch(args, seed, out_dir, fmt)
    except NoisySpinsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args, seed: int, out_dir: Path, fmt: str) -> int:
    from . import figures, io, liouvillian as lv, bethe
    from .params import ModelParams

    cmd = args.command
    if cmd == "fig1":
        result = figures.fig1_spectrum(
            out_dir,
            n=args.n or 6,
            omega_big=args.omega_big if args.omega_big is not None else 1.0,
            g_plus=args.g_plus if args.g_plus is not None else 800.0,
            g_zero=args.g_zero or 0.0,
            seed=seed, fmt=fmt,
        )
    elif cmd == "fig2":
        g_grid = _parse_g_grid(args)
        kwargs = {}
        if g_grid:
            kwargs["inv_g_values"] = [1.0 / g for g in g_grid]
        result = figures.fig2_roots(
            out_dir, n=args.n or 20,
            delta_y=args.delta_y if args.delta_y is not None else 2.0,
            seed=seed, fmt=fmt, **kwargs,
        )
    elif cmd == "fig3":
        result = figures.fig3_rates(
            out_dir,
            delta_y=args.delta_y if args.delta_y is not None else 2.0,
            g_grid=_parse_g_grid(args), seed=seed, fmt=fmt,
        )
    elif cmd == "fig4":
        result = figures.fig4_flow(
            out_dir, n=args.n or 5,
            omega_big=args.omega_big if args.omega_big is not None else 1.0,
            g_plus=args.g_plus if args.g_plus is not None else 800.0,
            d_omega_max=getattr(args, "d_omega_max", None) or 0.4,
            seed=seed, fmt=fmt,
        )
    elif cmd == "ed":
        n, omega = _resolve_omega(args, default_n=4, rng_width=0.2)
        p = ModelParams(
            n, args.omega_big if args.omega_big is not None else 1.0, omega,
            args.g_plus if args.g_plus is not None else 1.0, args.g_zero or 0.0,
        )
        sector = getattr(args, "sector", None)
        rec = lv.spectrum_by_sectors(p, None if sector is None else [sector])
        f = io.write_csv(out_dir / f"spectrum.{fmt}", {
            "re": rec.eigenvalues.real, "im": rec.eigenvalues.imag,
            "sector": rec.sectors,
        }, {"params": figures.param_echo(p)["params"], "seed": seed})
        result = {"files": [str(f)]}
    elif cmd == "bethe-solve":
        n, omega = _resolve_omega(args, default_n=6)
        if args.delta_y is None and not args.omega_file:
            raise ValueError("bethe-solve needs --delta-y or --omega-file")
        p = ModelParams(n, args.omega_big if args.omega_big is not None else 0.0,
                        omega, 1.0, args.g_zero or 0.0)
        g_grid = _parse_g_grid(args) or [args.g_plus if args.g_plus is not None else 100.0]
        sols = bethe.continuation_string_state(p, g_grid)
        gcol, kcol, re, im, lre, lim, res = [], [], [], [], [], [], []
        for g, sol in zip(g_grid, sols):
            for k, mu in enumerate(sol.roots):
                gcol.append(g)
                kcol.append(k)
                re.append(mu.real)
                im.append(mu.imag)
                lre.append(sol.eigenvalue.real)
                lim.append(sol.eigenvalue.imag)
                res.append(sol.residual_norm)
        f = io.write_csv(out_dir / f"bethe_roots.{fmt}", {
            "g_plus": gcol, "k": kcol, "re_mu": re, "im_mu": im,
            "lambda_re": lre, "lambda_im": lim, "residual_norm": res,
        }, {"params": figures.param_echo(p)["params"], "seed": seed})
        result = {"files": [str(f)]}
    elif cmd == "sweep":
        n, omega = _resolve_omega(args, default_n=4, rng_width=0.2)
        g_grid = _parse_g_grid(args) or [100.0]
        gcol, rates, lre, lim = [], [], [], []
        for g in g_grid:
            p = ModelParams(n, args.omega_big if args.omega_big is not None else 1.0,
                            omega, g, args.g_zero or 0.0)
            lam = lv.dominant_eigenvalue(lv.spectrum_by_sectors(p))
            gcol.append(g)
            rates.append(-lam.real)
            lre.append(lam.real)
            lim.append(lam.imag)
        f = io.write_csv(out_dir / f"sweep_rates.{fmt}", {
            "g_plus": gcol, "rate": rates, "lambda_re": lre, "lambda_im": lim,
        }, {"params": {"n_spins": n, "omega": list(omega)}, "seed": seed})
        result = {"files": [str(f)]}
    elif cmd == "validate":
        return _run_validate(args, out_dir)
    else:  # pragma: no cover
        raise ValueError(f"unknown command {cmd}")
    print(json.dumps(result, indent=2, default=str))
    return EXIT_OK


def _run_validate(args, out_dir: Path) -> int:
    from . import io, validate

    only = [c.strip() for c in args.only.split(",")] if getattr(args, "only", None) else None
    results = validate.run(only, fault=getattr(args, "inject_fault", None))
    report = {
        "version": io.version_string(),
        "fault": getattr(args, "inject_fault", None),
        "criteria": [
            {
                "id": r.cid, "name": r.name, "passed": r.passed,
                "runtime_s": r.runtime_s, "details": io._jsonable(r.details),
            }
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "validation_report.json"
    path.write_text(json.dumps(report, indent=2) + "\n")
    for r in results:
        print(f"{r.cid:4s} {'PASS' if r.passed else 'FAIL'}  {r.runtime_s:8.2f}s  {r.name}")
    print(f"report: {path}")
    return EXIT_OK if report["all_passed"] else EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
