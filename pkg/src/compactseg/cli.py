"""``compactseg`` command-line interface.

Subcommands: ``segment``, ``sweep``, ``bench``, ``calibrate``. Exit codes are
0 on success, 1 for usage errors, 2 for I/O errors and 3 for solver failures.
"""
import argparse
from importlib import resources
import logging
import math
from pathlib import Path
import sys

from .fields import EmptyRegion
from .force import alternate_means, two_phase_force
from .harness import ALGOS, COLUMNS, benchmark, evaluate, lambda_sweep, make_config, run_algo
from .imio import find_pairs, format_value, read_config, read_image, read_mask, write_csv, write_image, write_mask
from .kernels import DEFAULT_HALF_WIDTH, DEFAULT_SIGMA, calibrate_perimeter_constant
from .synth import add_gaussian_noise, add_salt_pepper

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_SOLVER = 0, 1, 2, 3

DEFAULT_SWEEP = "2,1,0.5,0.2,0.1"
PARAM_DESTS = ("lam", "epsilon", "tau", "sigma", "kernel_n", "max_iters", "stop_tol", "mu1", "mu2", "empty_fallback")


class UsageError(Exception):
    pass


class InputError(Exception):
    """Input files exist but cannot be used (e.g. unpaired corpus files)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("solver parameters")
    g.add_argument("--lambda", dest="lam", type=str, help="fidelity weight (sweep: comma-separated list)")
    g.add_argument("--epsilon", type=float, help="entropy weight for pd-std")
    g.add_argument("--tau", type=float, help="proximal dual step for pd-std ('inf' for exact)")
    g.add_argument("--sigma", type=float, help=f"Gaussian kernel SD in pixels (default {DEFAULT_SIGMA})")
    g.add_argument("--kernel-n", dest="kernel_n", type=int, help=f"kernel half width (default {DEFAULT_HALF_WIDTH})")
    g.add_argument("--iters", dest="max_iters", type=int, help="maximum iterations")
    g.add_argument("--stop-tol", dest="stop_tol", type=float, help="pd-std stopping tolerance")
    g.add_argument("--mu1", type=float, help="admm penalty on u = z")
    g.add_argument("--mu2", type=float, help="admm penalty on s = <z, 1>")
    g.add_argument("--no-empty-fallback", dest="empty_fallback", action="store_false", default=None,
                   help="fail (exit 3) instead of keeping the previous iterate when pd-td empties the region")
    g.add_argument("--c1", type=float, default=1.0, help="foreground mean for the region force")
    g.add_argument("--c2", type=float, default=0.0, help="background mean for the region force")
    p.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    p.add_argument("--noise", help="corrupt inputs first: gaussian:SD or saltpepper:PROB")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--config", help="key = value file; command-line flags win")
    p.add_argument("--trace", action="store_true", help="print the per-iteration energy trace")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser():
    common = _common()
    parser = _Parser(prog="compactseg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    seg = sub.add_parser("segment", parents=[common], help="segment one image")
    seg.add_argument("--in", dest="input", required=True, help="input image (PNG or PGM)")
    seg.add_argument("--gt", help="ground-truth mask for metrics")
    seg.add_argument("--out", default="compactseg_out", help="output directory")
    seg.add_argument("--algo", default="pd-std", choices=ALGOS)
    seg.add_argument("--refine-means", action="store_true", help="alternate mean refresh and solve (max 5 rounds)")

    sw = sub.add_parser("sweep", parents=[common], help="solve over a lambda grid")
    sw.add_argument("--in", dest="input", required=True, help="input image")
    sw.add_argument("--gt", help="ground-truth mask")
    sw.add_argument("--out", default="sweep_out", help="output directory")
    sw.add_argument("--algo", default=",".join(ALGOS), help="comma-separated algorithms")

    be = sub.add_parser("bench", parents=[common], help="per-algorithm mean metrics and timing over a corpus")
    be.add_argument("--in", dest="input", help="directory of NAME.png / NAME_gt.png pairs (default: bundled corpus)")
    be.add_argument("--out", help="write per-algorithm summary CSV here")
    be.add_argument("--algo", default=",".join(ALGOS), help="comma-separated algorithms")

    ca = sub.add_parser("calibrate", parents=[common], help="print the perimeter calibration constant")
    ca.add_argument("--grid", type=int, default=128, help="grid size of the calibration disk")

    return parser, sub.choices


def _parse(argv):
    parser, subparsers = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = read_config(args.config)
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        sp = subparsers[args.command]
        by_flag = {opt[2:]: a for a in sp._actions for opt in a.option_strings if opt.startswith("--")}
        unknown = sorted(set(cfg) - set(by_flag))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        sp.set_defaults(**{by_flag[k].dest: _config_value(by_flag[k], k, v) for k, v in cfg.items()})
        args = parser.parse_args(argv)
    return args


def _config_value(action, key, text):
    """Config values arrive as strings; switches take yes/no style values."""
    if action.nargs != 0:
        return text
    word = text.strip().lower()
    if word in ("1", "true", "yes", "on"):
        on = True
    elif word in ("0", "false", "no", "off"):
        on = False
    else:
        raise UsageError(f"config key {key!r} expects yes/no, got {text!r}")
    return action.const if on else action.default


def _float_list(text):
    try:
        values = [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None
    if not values:
        raise UsageError("empty lambda list")
    return values


def _algos(text):
    algos = [a.strip() for a in text.split(",") if a.strip()]
    bad = [a for a in algos if a not in ALGOS]
    if bad or not algos:
        raise UsageError(f"unknown algorithm(s) {bad}; choose from {ALGOS}")
    return algos


def _params(args, lam=None):
    params = {k: getattr(args, k, None) for k in PARAM_DESTS}
    params["lam"] = lam
    return params


def _single_lambda(args):
    if args.lam is None:
        return None
    values = _float_list(args.lam)
    if len(values) != 1:
        raise UsageError("this command takes a single --lambda value")
    return values[0]


def _apply_noise(image, noise, seed):
    if not noise:
        return image
    kind, _, level = noise.partition(":")
    try:
        level = float(level)
    except ValueError:
        raise UsageError(f"bad --noise {noise!r}") from None
    if kind == "gaussian":
        return add_gaussian_noise(image, level, seed)
    if kind in ("saltpepper", "salt-pepper", "sp"):
        return add_salt_pepper(image, level, seed)
    raise UsageError(f"unknown noise model {kind!r}")


def _print_trace(report, out):
    print("k,energy,lagrangian,p", file=out)
    for k, e, lag, p in report.energy_trace:
        print(",".join(format_value(v) for v in (k, e, lag, p)), file=out)


def cmd_segment(args, out):
    lam = _single_lambda(args)
    image = _apply_noise(read_image(args.input), args.noise, args.seed)
    gt = read_mask(args.gt) if args.gt else None
    params = _params(args, lam)

    def solve(f):
        return run_algo(args.algo, f, **params)

    if args.refine_means:
        report, c1, c2 = alternate_means(image, solve, args.c1, args.c2)
    else:
        report = solve(two_phase_force(image, args.c1, args.c2))

    outdir = Path(args.out)
    write_mask(report.mask, outdir / "mask.png")
    if args.algo != "pd-td":
        write_image(report.soft_u, outdir / "soft.png")
    row = evaluate(report, gt, lam if lam is not None else make_config(args.algo).lam)
    write_csv([row], COLUMNS, outdir / "metrics.csv")
    if args.trace:
        _print_trace(report, out)
    print(",".join(COLUMNS), file=out)
    print(",".join(format_value(row[c]) for c in COLUMNS), file=out)
    if report.emptied:
        print("warning: an iterate emptied the region; returned the previous iterate", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args, out):
    lambdas = _float_list(args.lam if args.lam is not None else DEFAULT_SWEEP)
    algos = _algos(args.algo)
    image = _apply_noise(read_image(args.input), args.noise, args.seed)
    gt = read_mask(args.gt) if args.gt else None
    f = two_phase_force(image, args.c1, args.c2)
    params = _params(args)
    params.pop("lam")
    rows, masks = lambda_sweep(f, lambdas, algos, gt=gt, jobs=args.jobs, **params)
    outdir = Path(args.out)
    write_csv(rows, COLUMNS, outdir / "sweep.csv")
    for (algo, lam), mask in masks.items():
        write_mask(mask, outdir / "masks" / f"{algo}_lam{format_value(lam)}.png")
    for row in rows:
        print(",".join(format_value(row[c]) for c in COLUMNS), file=out)
    return EXIT_OK


def bundled_corpus():
    return resources.files("compactseg") / "data" / "corpus"


def cmd_bench(args, out):
    lam = _single_lambda(args)
    algos = _algos(args.algo)
    directory = Path(args.input) if args.input else Path(str(bundled_corpus()))
    try:
        found = find_pairs(directory)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    pairs = []
    for img_path, gt_path in found:
        image = _apply_noise(read_image(img_path), args.noise, args.seed)
        pairs.append((two_phase_force(image, args.c1, args.c2), read_mask(gt_path)))
    summary, _ = benchmark(pairs, algos, jobs=args.jobs, **_params(args, lam))
    columns = ("algo", "dice", "iou", "compactness", "seconds", "n")
    rows = [dict(algo=a, **summary[a]) for a in algos]
    print(f"{'algo':<8} {'dice':>8} {'iou':>8} {'compact':>9} {'time(s)':>9} {'n':>3}", file=out)
    for r in rows:
        print(f"{r['algo']:<8} {r['dice']:8.4f} {r['iou']:8.4f} {r['compactness']:9.4f} {r['seconds']:9.4f} {r['n']:3d}",
              file=out)
    if args.out:
        write_csv(rows, columns, args.out)
    return EXIT_OK


def cmd_calibrate(args, out):
    sigma = args.sigma if args.sigma is not None else DEFAULT_SIGMA
    n = args.kernel_n if args.kernel_n is not None else (DEFAULT_HALF_WIDTH if args.sigma is None else None)
    if n is None:
        n = math.ceil(3 * sigma)
    c = calibrate_perimeter_constant(sigma, n, args.grid)
    print(f"sigma={format_value(sigma)} n={n} grid={args.grid} c={c:.6g}", file=out)
    return EXIT_OK


COMMANDS = {"segment": cmd_segment, "sweep": cmd_sweep, "bench": cmd_bench, "calibrate": cmd_calibrate}


def main(argv=None):
    try:
        args = _parse(argv)
    except UsageError as exc:
        print(f"compactseg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"compactseg: error: {exc}", file=sys.stderr)
        return EXIT_IO
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, sys.stdout)
    except UsageError as exc:
        print(f"compactseg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EmptyRegion as exc:
        print(f"compactseg: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (OSError, InputError) as exc:
        print(f"compactseg: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # parameter validation in the solver configs
        print(f"compactseg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
