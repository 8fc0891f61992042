"""opmodel CLI entrypoint.

Each command prints a JSON report to stdout (and to ``--out`` when given)::

    python -m opmodel.main embed-check --preset sic
    python -m opmodel.main ext-check --preset misra --mesh 2000
    python -m opmodel.main chsh --preset tsirelson --sweep 100000
    python -m opmodel.main mb --mesh 10000 --effect z-projection --csv hist.csv
    python -m opmodel.main wigner --state hermite1 --out w.csv
    python -m opmodel.main tomography --trials 100
    python -m opmodel.main gleason-effects --dim 3 --trials 100

Exit codes: 0 success (embed-check / ext-check: good), 1 not-good,
2 inconclusive, usage or input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Callable, Sequence

from opmodel import __version__
from opmodel.config import Settings, get_settings
from opmodel.tools.bell import TSIRELSON_ANGLES, parse_angles, run_chsh
from opmodel.tools.embed_check import EMBED_PRESETS, EXIT_CODES, EXT_PRESETS, run_embed_check, run_ext_check
from opmodel.tools.mb import run_mb
from opmodel.tools.reports import build_report, render_report, write_text
from opmodel.tools.tomography import run_gleason_effects, run_tomography
from opmodel.tools.wigner_table import STATES, run_wigner
from opmodel.utils import OpModelError, round_sig, setup_logging

logger = logging.getLogger("opmodel")


def _at_least(minimum: int) -> Callable[[str], int]:
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value

    return parse


def _build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opmodel", description="Operational models: embeddings, extensions, demos")
    parser.add_argument("--version", action="version", version=f"opmodel {__version__}")
    parser.add_argument("--log-level", default=settings.log_level, help="DEBUG, INFO, WARNING, ERROR")
    parser.add_argument("--no-timestamp", action="store_true", help="Omit the report timestamp")
    parser.add_argument("--out", dest="report_out", default=None, help="Also write the JSON report here")
    parser.add_argument("--seed", type=int, default=settings.seed, help="RNG seed (env OPMODEL_SEED)")
    parser.add_argument("--tol", type=float, default=settings.tol)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed-check", help="Is a state map a good embedding?")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=EMBED_PRESETS)
    src.add_argument("--model", dest="model_path", help="ModelFile JSON (source model)")
    p.add_argument("--map", dest="map_path", help="MapFile JSON; identity on --model when omitted")
    p.add_argument("--samples", type=_at_least(0), default=settings.embed_samples)
    p.add_argument("--reduced", action="store_true", help="Check the model reduced to SIC-POVM ranges")

    p = sub.add_parser("ext-check", help="Is a reduction a good extension?")
    p.add_argument("--preset", choices=EXT_PRESETS, required=True)
    p.add_argument("--mesh", type=_at_least(4), default=settings.mesh_size)
    p.add_argument("--samples", type=_at_least(1), default=50)

    p = sub.add_parser(
        "chsh",
        help="CHSH value on the singlet through pure-state kernels",
        description="CSV columns: pair, E",
    )
    angles = p.add_mutually_exclusive_group()
    angles.add_argument("--angles", type=parse_angles, help="a,a',b,b' polarizer angles in degrees")
    angles.add_argument("--preset", choices=("tsirelson",))
    p.add_argument(
        "--sweep",
        type=_at_least(1),
        nargs="?",
        const=settings.chsh_sweep,
        default=None,
        help=f"Random setting quadruples (bare flag: {settings.chsh_sweep})",
    )
    p.add_argument("--csv", dest="csv_path", default=None)

    p = sub.add_parser(
        "mb",
        help="Fuzziness profile and preimage demo on a pure-state mesh",
        description="CSV columns: bin_lo, bin_hi, count",
    )
    p.add_argument("--mesh", type=_at_least(4), default=settings.mesh_size)
    p.add_argument("--effect", default="z-projection", help="z-projection or an EffectFile JSON path")
    p.add_argument("--allow-fuzzy", action="store_true")
    p.add_argument("--csv", dest="csv_path", default=None)

    p = sub.add_parser(
        "wigner",
        help="Wigner table of a reference state",
        description="CSV columns: q, p, W",
    )
    p.add_argument("--state", choices=STATES, default="gauss")
    p.add_argument("--grid", type=_at_least(2), default=settings.wigner_points)
    p.add_argument("--extent", type=float, default=settings.wigner_extent)
    p.add_argument("--p-extent", type=float, default=settings.wigner_p_extent)
    p.add_argument("--q0", type=float, default=0.0)
    p.add_argument("--p0", type=float, default=0.0)
    p.add_argument("--out", "--csv", dest="csv_path", default=None, help="Write the (q, p, W) table here")

    p = sub.add_parser("tomography", help="SIC-POVM tomography round trip")
    p.add_argument("--trials", type=_at_least(1), default=100)

    p = sub.add_parser("gleason-effects", help="Valuations on effects: reconstruction and additivity")
    p.add_argument("--dim", type=_at_least(2), default=2)
    p.add_argument("--trials", type=_at_least(1), default=100)
    return parser


def _dispatch(args: argparse.Namespace, settings: Settings) -> dict[str, Any]:
    if args.command == "embed-check":
        return run_embed_check(
            preset=args.preset,
            model_path=args.model_path,
            map_path=args.map_path,
            reduced=args.reduced,
            samples=args.samples,
            seed=args.seed,
            tol=args.tol,
            tol_lp=settings.tol_lp,
            max_iterations=settings.lp_max_iterations,
        )
    if args.command == "ext-check":
        return run_ext_check(preset=args.preset, mesh=args.mesh, samples=args.samples, seed=args.seed, tol=args.tol)
    if args.command == "chsh":
        return run_chsh(
            angles=args.angles or TSIRELSON_ANGLES,
            sweep=args.sweep,
            seed=args.seed,
            csv_path=args.csv_path,
        )
    if args.command == "mb":
        return run_mb(
            mesh=args.mesh,
            effect=args.effect,
            allow_fuzzy=args.allow_fuzzy,
            seed=args.seed,
            csv_path=args.csv_path,
        )
    if args.command == "wigner":
        return run_wigner(
            state=args.state,
            points=args.grid,
            extent=args.extent,
            p_extent=args.p_extent,
            q0=args.q0,
            p0=args.p0,
            csv_path=args.csv_path,
        )
    if args.command == "tomography":
        return run_tomography(trials=args.trials, seed=args.seed, tol=args.tol, tol_psd=settings.tol_psd)
    if args.command == "gleason-effects":
        return run_gleason_effects(
            dim=args.dim, trials=args.trials, seed=args.seed, tol=args.tol, tol_psd=settings.tol_psd
        )
    raise OpModelError("USAGE", f"unknown command {args.command!r}")


def main(argv: Sequence[str] | None = None) -> int:
    settings = get_settings()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = _build_parser(settings).parse_args(argv)
    setup_logging(args.log_level)

    try:
        results = _dispatch(args, settings)
    except OpModelError as exc:
        logger.error("%s failed: %s", args.command, exc)
        print(f"opmodel {args.command}: {exc}", file=sys.stderr)
        return 2

    verdict = results.pop("verdict", None)
    report = build_report(
        args.command,
        argv,
        seed=args.seed,
        tolerances={**settings.tolerances, "tol": args.tol},
        results=round_sig(results, settings.report_digits),
        verdict=verdict,
        timestamp=not args.no_timestamp,
    )
    text = render_report(report, settings.report_digits)
    print(text)
    if args.report_out:
        try:
            write_text(args.report_out, text)
        except OpModelError as exc:
            print(f"opmodel {args.command}: {exc}", file=sys.stderr)
            return 2
    return EXIT_CODES.get(verdict, 0) if verdict is not None else 0


if __name__ == "__main__":
    sys.exit(main())
