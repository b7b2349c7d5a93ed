"""Command-line surface: reproduce the bound tables and effective-isometry
curves as CSV, run seeded Monte Carlo recovery sweeps, and execute the
numerical verification suites.

Exit codes: 0 all checks pass, 1 usage or I/O error, 2 a derived
verification failed.  Every CSV starts with a ``#``-prefixed run manifest;
identical command lines (including seeds) produce byte-identical data
sections.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import RipkitError
from .omp import OmpConfig, omp, omp_threshold
from .ric import exact_ric, ric_bound
from .sensing import (
    L2Ball,
    LinfCorrelation,
    generate_gaussian_matrix,
    generate_near_orthonormal_matrix,
    generate_sparse_signal,
    measure,
)
from .interference import effective_ric_estimate
from .sp import SpConfig, sp_constants, sp_guarantee, subspace_pursuit
from .verify import SUITES, stability_margin

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2


@dataclass(frozen=True)
class RunManifest:
    """Provenance header emitted as comment lines at the top of every CSV."""

    command: str
    parameters: tuple[tuple[str, str], ...]
    seed_base: int
    tool_version: str = __version__
    started_at: str = ""

    def lines(self) -> list[str]:
        out = [f"# command={self.command}"]
        out += [f"# {key}={value}" for key, value in self.parameters]
        out += [
            f"# seed_base={self.seed_base}",
            f"# tool_version={self.tool_version}",
            f"# started_at={self.started_at}",
        ]
        return out


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _fmt(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return str(value)


def write_csv(path, manifest: RunManifest, header, rows) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for line in manifest.lines():
            fh.write(line + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _manifest(command: str, args, keys, seed_base: int = 0) -> RunManifest:
    params = tuple((key, _fmt(getattr(args, key))) for key in keys)
    return RunManifest(command, params, seed_base, started_at=_now())


def cmd_bounds_table(args) -> int:
    if not (1 <= args.k_min <= args.k_max):
        print("error: need 1 <= k-min <= k-max", file=sys.stderr)
        return EXIT_USAGE
    rows = [
        (
            k,
            ric_bound("davenport_wakin", k),
            ric_bound("huang_zhu", k),
            ric_bound("mo_shen", k),
            ric_bound("proposed", k),
            ric_bound("conjectured", k),
        )
        for k in range(args.k_min, args.k_max + 1)
    ]
    write_csv(
        args.out,
        _manifest("bounds-table", args, ("k_min", "k_max")),
        ("k", "bound_davenport_wakin", "bound_huang_zhu", "bound_mo_shen", "bound_proposed", "bound_conjectured"),
        rows,
    )
    return EXIT_OK


def _delta_grid(lo: float, hi: float, step: float) -> list[float]:
    grid = []
    i = 0
    while True:
        d = lo + i * step
        if d > hi + 1e-12:
            break
        grid.append(d)
        i += 1
    return grid


def cmd_effective_ric(args) -> int:
    if not (0.0 < args.delta_min < args.delta_max < 1.0):
        print("error: need 0 < delta-min < delta-max < 1", file=sys.stderr)
        return EXIT_USAGE
    rows = [
        (
            d,
            effective_ric_estimate("davenport", d),
            effective_ric_estimate("plane_geometry", d),
            effective_ric_estimate("proposed", d),
        )
        for d in _delta_grid(args.delta_min, args.delta_max, args.step)
    ]
    write_csv(
        args.out,
        _manifest("effective-ric", args, ("delta_min", "delta_max", "step")),
        ("delta", "delta_bar_a", "delta_bar_g", "delta_bar_proposed"),
        rows,
    )
    return EXIT_OK


def cmd_sp_constants(args) -> int:
    if not (0.0 < args.delta_min < args.delta_max < 1.0):
        print("error: need 0 < delta-min < delta-max < 1", file=sys.stderr)
        return EXIT_USAGE
    rows = []
    for d in _delta_grid(args.delta_min, args.delta_max, args.step):
        c = sp_constants(d)
        rows.append((d, c.alpha, c.beta, c.c_k, c.c_prime_k, c.c_bar_k, stability_margin(d)))
    write_csv(
        args.out,
        _manifest("sp-constants", args, ("delta_min", "delta_max", "step")),
        ("delta", "alpha", "beta", "c_k", "c_prime_k", "c_bar_k", "stability_margin"),
        rows,
    )
    return EXIT_OK


def _parse_noise(text: str):
    if text == "none":
        return None
    kind, _, level = text.partition(":")
    try:
        eps = float(level)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad noise spec {text!r}; use none, l2:EPS, or linf:EPS")
    if kind == "l2":
        return ("l2", eps)
    if kind == "linf":
        return ("linf", eps)
    raise argparse.ArgumentTypeError(f"bad noise spec {text!r}; use none, l2:EPS, or linf:EPS")


def _trial_matrix(args, seed: int):
    if args.m == args.n:
        # A square dictionary is drawn orthonormal so every trial is recoverable.
        return generate_near_orthonormal_matrix(args.m, args.n, seed, spread=0.0)
    if args.ensemble == "near_orthonormal":
        return generate_near_orthonormal_matrix(args.m, args.n, seed, spread=args.spread)
    return generate_gaussian_matrix(args.m, args.n, seed)


def _run_sweep(args, thresholded: bool) -> int:
    if not (1 <= args.k <= args.m <= args.n):
        print("error: need 1 <= k <= m <= n", file=sys.stderr)
        return EXIT_USAGE
    noise = args.noise
    if thresholded and noise is None:
        print("error: noisy-sweep requires --noise l2:EPS or linf:EPS", file=sys.stderr)
        return EXIT_USAGE
    if thresholded and args.algorithm != "omp":
        print("error: threshold filtering applies to omp only", file=sys.stderr)
        return EXIT_USAGE
    certify = args.certify or thresholded
    order = args.k + 1 if args.algorithm == "omp" else 3 * args.k

    rows = []
    failures = 0
    certified_count = 0
    for trial in range(args.trials):
        # One seed per trial; signal and noise draws use disjoint offsets so
        # they do not replay the matrix's stream.
        seed = args.seed + trial
        signal_seed = seed + 2**32
        noise_seed = seed + 2**33
        phi = _trial_matrix(args, seed)
        delta = float("nan")
        certified = False
        if certify:
            delta = exact_ric(phi, order).delta
            if args.algorithm == "omp":
                certified = delta < ric_bound("proposed", args.k)
            else:
                certified = sp_guarantee(delta)

        if thresholded and certified:
            name = "l2_proposed" if noise[0] == "l2" else "linf_proposed"
            floor = 1.02 * omp_threshold(name, args.k, delta, noise[1])
            x = generate_sparse_signal(
                args.n, args.k, signal_seed, "uniform_min_magnitude", min_magnitude=floor
            )
        else:
            x = generate_sparse_signal(args.n, args.k, signal_seed)

        if noise is None:
            meas = measure(phi, x, None)
        elif noise[0] == "l2":
            meas = measure(phi, x, L2Ball(noise[1]), seed=noise_seed)
        else:
            # Drawn at half the stopping level: the hypothesis only needs
            # ||Phi^T w||_inf <= eps, and the halt-at-k margin stays safe.
            meas = measure(phi, x, LinfCorrelation(noise[1] / 2.0), seed=noise_seed)

        if args.algorithm == "omp":
            if noise is None:
                config = OmpConfig.noiseless(args.k)
            elif noise[0] == "l2":
                config = OmpConfig.l2_stopping(noise[1])
            else:
                config = OmpConfig.linf_stopping(noise[1])
            result = omp(phi, meas.y, config)
        else:
            result, _ = subspace_pursuit(phi, meas.y, SpConfig(k=args.k))

        success = result.final_support == x.support
        recon = float(np.linalg.norm(result.estimate.dense() - x.dense()))
        if certified:
            certified_count += 1
            if not success:
                failures += 1
        rows.append(
            (
                trial,
                seed,
                delta,
                int(certified),
                int(success),
                result.iterations,
                result.final_residual_norm,
                recon,
            )
        )

    command = "noisy-sweep" if thresholded else "recovery-sweep"
    noise_text = "none" if noise is None else f"{noise[0]}:{noise[1]:g}"
    manifest = RunManifest(
        command,
        (
            ("algorithm", args.algorithm),
            ("m", str(args.m)),
            ("n", str(args.n)),
            ("k", str(args.k)),
            ("trials", str(args.trials)),
            ("noise", noise_text),
            ("certify", str(int(certify))),
            ("ensemble", args.ensemble),
            ("spread", _fmt(args.spread)),
        ),
        args.seed,
        started_at=_now(),
    )
    write_csv(
        args.out,
        manifest,
        ("trial", "seed", "delta_exact", "certified", "success", "iterations", "final_residual", "recon_error_l2"),
        rows,
    )
    if certify:
        rate = certified_count / args.trials if args.trials else 0.0
        print(f"certified {certified_count}/{args.trials} trials (rate {rate:.3f}), {failures} certified failures")
    if failures:
        print(f"error: {failures} certified trials failed recovery", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_recovery_sweep(args) -> int:
    return _run_sweep(args, thresholded=False)


def cmd_noisy_sweep(args) -> int:
    return _run_sweep(args, thresholded=True)


def cmd_verify(args) -> int:
    result = SUITES[args.suite](args.seed)
    manifest = _manifest("verify", args, ("suite",), seed_base=args.seed)
    write_csv(args.out, manifest, result.header, result.rows)
    for note in result.notes:
        print(note)
    if not result.passed:
        print(f"error: suite {args.suite} reported failures", file=sys.stderr)
        return EXIT_VERIFY
    print(f"suite {args.suite}: all checks passed")
    return EXIT_OK


def _coerce(text: str):
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def _load_config(path) -> dict:
    values = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = _coerce(value.strip())
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ripkit",
        description="Sparse recovery, isometry certification, and verification experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub_map = {}

    def add(name, func, configure):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key=value defaults file; flags override")
        p.add_argument("--out", required=True, help="output CSV path")
        configure(p)
        p.set_defaults(func=func)
        sub_map[name] = p

    def conf_bounds(p):
        p.add_argument("--k-min", type=int, default=1)
        p.add_argument("--k-max", type=int, default=64)

    def conf_effective(p):
        p.add_argument("--delta-min", type=float, default=0.001)
        p.add_argument("--delta-max", type=float, default=0.999)
        p.add_argument("--step", type=float, default=0.001)

    def conf_sweep(p):
        p.add_argument("--algorithm", choices=("omp", "sp"), default="omp")
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--noise", type=_parse_noise, default="none")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--certify", action="store_true")
        p.add_argument("--ensemble", choices=("gaussian", "near_orthonormal"), default="gaussian")
        p.add_argument("--spread", type=float, default=0.0)

    def conf_verify(p):
        p.add_argument("--suite", choices=sorted(SUITES), required=True)
        p.add_argument("--seed", type=int, default=0)

    add("bounds-table", cmd_bounds_table, conf_bounds)
    add("effective-ric", cmd_effective_ric, conf_effective)
    add("sp-constants", cmd_sp_constants, conf_effective)
    add("recovery-sweep", cmd_recovery_sweep, conf_sweep)
    add("noisy-sweep", cmd_noisy_sweep, conf_sweep)
    add("verify", cmd_verify, conf_verify)
    return parser, sub_map


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, sub_map = build_parser()
    if "--config" in argv and argv and argv[0] in sub_map:
        try:
            config = _load_config(argv[argv.index("--config") + 1])
        except (OSError, IndexError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_USAGE
        sub_map[argv[0]].set_defaults(**config)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except RipkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    raise SystemExit(main())
