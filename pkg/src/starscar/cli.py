"""Command-line entry point: ``starscar <command> [options]``.

Every command writes one file (``landscape`` also writes a minima summary)
whose header or ``metadata`` block records the run configuration and the
package version.  Exit status is 0 on success, 1 when ``verify`` finds a
failing check and 2 for invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import entropy as ent
from . import landscape as ls
from . import scars as sc
from . import serialize as ser
from . import spectral as sp
from . import verify as vf
from .errors import AdmissibilityError
from .graphcore import CentralScattering, StarGraph

OUTPUT_ENV = "STARSCAR_OUTPUT_DIR"
EXIT_OK, EXIT_VERIFY_FAILED, EXIT_CONFIG = 0, 1, 2
FAMILY_CHOICES = ("fourier", "permuted", "general-j", "et")


class ConfigError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(t) if t.strip() not in ("inf", "Inf") else math.inf for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _sign(text: str) -> int:
    if text in ("+", "+1", "1"):
        return 1
    if text in ("-", "-1"):
        return -1
    raise argparse.ArgumentTypeError(f"sign must be +1 or -1, got {text!r}")


def output_path(args, default_name: str) -> Path:
    if args.output:
        return Path(args.output)
    return Path(os.environ.get(OUTPUT_ENV, ".")) / default_name


def run_config(args) -> dict:
    """The computation-relevant arguments, embedded in every output file."""
    skip = {"output", "func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def load_graph(args) -> StarGraph:
    if args.graph:
        try:
            data = json.loads(Path(args.graph).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read graph file {args.graph}: {exc}") from exc
        return ser.graph_from_dict(data)
    if args.B is None:
        raise ConfigError("give either --graph FILE or --B")
    lengths = args.lengths
    if lengths == "sqrt-primes":
        return StarGraph.with_sqrt_primes(args.B, CentralScattering(args.central))
    L = _floats(lengths)
    if len(L) != args.B:
        raise ConfigError(f"--lengths has {len(L)} entries but --B is {args.B}")
    return StarGraph(np.array(L), CentralScattering(args.central))


def build_scar(args, B: int):
    fam = args.family
    if fam == "fourier":
        return sc.fourier_halfscar(B, args.kappa, args.eps1, args.eps2)[0]
    if fam == "permuted":
        return sc.permuted_halfscar(B, args.j, args.kappa, args.eps1, args.eps2)
    if fam == "et":
        return sc.equitransmitting_halfscar(B, args.kappa, args.eps1, args.eps2)
    basis = sc.fourier_general_j(B, args.j, args.kappa)
    return sc.general_j_scar(basis, args.root, args.eps1)


# -- commands --------------------------------------------------------------


def cmd_spectrum(args) -> int:
    g = load_graph(args)
    if args.kmin < 0:
        raise ConfigError("--kmin must be >= 0")
    roots = sp.secular_roots(g, args.kmin, args.kmax, step=args.step)
    rows = [(r.k, r.residual, r.multiplicity, "") for r in roots]
    path = ser.write_csv(
        output_path(args, "spectrum.csv"),
        ["k", "residual", "multiplicity", "distance_to_target"],
        rows,
        run_config(args),
    )
    print(f"{len(roots)} roots -> {path}")
    return EXIT_OK


def _scar_record(scar, reduced, rhos) -> dict:
    report = ent.entropy_report(scar.vec, rhos=rhos, sigmas=(0.5, 1.0), reduced=reduced, lifted=True)
    return {**ser.scar_to_dict(scar), "residual": scar.residual, "entropy": report.to_dict()}


def cmd_scar(args) -> int:
    B = args.B
    if B is None:
        raise ConfigError("--B is required")
    payload: dict
    if args.family == "general-j":
        basis = sc.fourier_general_j(B, args.j, args.kappa)
        records = []
        for r in range(4):
            scar = sc.general_j_scar(basis, r, args.eps1)
            rec = _scar_record(scar, scar.operator[:B, B:] @ scar.operator[B:, :B], args.rho)
            rec.update(
                root=basis.roots[r],
                quartic_residual=float(basis.root_residuals[r]),
                norm_sq=float(basis.norm_sq[r]),
                norm_sq_closed=float(basis.norm_sq_closed[r]),
                reduced_shannon=ent.shannon(basis.f[r]),
            )
            records.append(rec)
        payload = {"W": basis.W, "records": records}
    else:
        scar = build_scar(args, B)
        reduced = scar.operator[:B, B:] @ scar.operator[B:, :B]
        payload = {"records": [_scar_record(scar, reduced, args.rho)]}
    path = ser.write_json(output_path(args, "scar.json"), payload, run_config(args))
    print(f"{len(payload['records'])} scar record(s) -> {path}")
    return EXIT_OK


def cmd_converge(args) -> int:
    g = load_graph(args)
    scar = build_scar(args, g.B)
    if args.control:
        g = scar.host_graph(args.k0)
    trace = sp.scar_convergence_scan(g, scar, args.kmax, report_every=args.report_every, kmin=args.kmin)
    running = trace.running_min_series()
    rows = [(k, d, m) for (k, d), m in zip(trace.records, running)]
    path = ser.write_csv(
        output_path(args, "converge.csv"), ["k", "distance_to_target", "running_min"], rows, run_config(args)
    )
    print(f"{len(rows)} roots, running minimum {trace.running_min:.6g} -> {path}")
    return EXIT_OK


def cmd_landscape(args) -> int:
    grid = ls.scan(args.resolution, args.degeneracy_tol)
    rows = (
        (p.x1, p.x2, p.min_doubled_entropy, p.degenerate)
        for p in grid.points()
    )
    path = ser.write_csv(
        output_path(args, "landscape.csv"),
        ["x1", "x2", "min_doubled_entropy", "degenerate_flag"],
        rows,
        run_config(args),
    )
    minima = ls.find_minima(grid)
    summary = path.with_name(path.stem + "_minima.json")
    ser.write_json(
        summary,
        {
            "global_minimum": minima[0][2],
            "minima": [{"x1": a, "x2": b, "value": v} for a, b, v in minima[: args.top]],
            "degenerate_nodes": int(grid.degenerate.sum()),
        },
        run_config(args),
    )
    print(f"minimum {minima[0][2]:.6f} -> {path}, {summary}")
    return EXIT_OK


def cmd_entropy(args) -> int:
    """Entropy sweep of the reduced first-bond eigenvector over several ``B``."""
    rows = []
    for B in args.B_list:
        if args.family == "fourier":
            x = sc.halfscar_core(B, args.kappa, args.eps2).x
            closed = ent.halfscar_entropy_closed_form(B, args.kappa, args.eps2)
            closed_pair = ent.halfscar_renyi_pair_closed_form(B, args.kappa, args.eps2)
            ref = ent.asymptotic_reference("FourierFirstBond-S", B) - math.log(2)
        elif args.family == "et":
            x = sc.equitransmitting_halfscar(B, args.kappa, 1, args.eps2).vec[:B]
            closed, closed_pair = ent.et_reduced_shannon(B), ent.et_reduced_renyi_pair(B)
            ref = closed
        else:
            raise ConfigError("entropy sweeps support --family fourier or et")
        rows.append((B, ent.shannon(x), closed, ent.renyi_pair(x, 1.0), closed_pair, ref))
    path = ser.write_csv(
        output_path(args, "entropy.csv"),
        ["B", "shannon", "shannon_closed_form", "renyi_pair", "renyi_pair_closed_form", "leading_order"],
        rows,
        run_config(args),
    )
    print(f"{len(rows)} rows -> {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    explicit = None
    if args.graph:
        data = json.loads(Path(args.graph).read_text())
        central = data.get("central")
        if isinstance(central, dict) and "explicit" in central:
            explicit = ser.decode_matrix(central["explicit"])
    only = [s for chunk in (args.only or []) for s in chunk.split(",") if s]
    checks = vf.run(args.seed, only or None, explicit)
    failed = [c.name for c in checks if not c.passed]
    path = ser.write_json(
        output_path(args, "verify.json"),
        {"passed": not failed, "failed": failed, "checks": [c.to_dict() for c in checks]},
        run_config(args),
    )
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}")
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed -> {path}")
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


# -- parser ----------------------------------------------------------------


def _graph_args(p):
    p.add_argument("--graph", help="graph description JSON file")
    p.add_argument("--B", type=int, help="bond count (when no --graph is given)")
    p.add_argument("--lengths", default="sqrt-primes", help="'sqrt-primes' or comma-separated lengths")
    p.add_argument("--central", default="fourier", choices=("fourier", "et-paley", "kirchhoff"))


def _scar_args(p, family_default="fourier"):
    p.add_argument("--family", default=family_default, choices=FAMILY_CHOICES)
    p.add_argument("--kappa", type=float, default=0.7)
    p.add_argument("--eps1", type=_sign, default=1)
    p.add_argument("--eps2", type=_sign, default=1)
    p.add_argument("--j", type=int, default=2, help="bond index for permuted and general-j scars")
    p.add_argument("--root", type=int, default=0, choices=range(4), help="quartic root index for general-j")


def _common(p):
    p.add_argument("-o", "--output", help=f"output file (default: ${OUTPUT_ENV} or the working directory)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="starscar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="secular roots in a k-range (CSV)")
    _graph_args(p)
    p.add_argument("--kmin", type=float, default=0.0)
    p.add_argument("--kmax", type=float, default=10.0)
    p.add_argument("--step", type=float, default=None)
    _common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("scar", help="build a scar with entropy report (JSON)")
    p.add_argument("--B", type=int)
    _scar_args(p)
    p.add_argument("--rho", type=_floats, default=[-0.5, 0.5, 1.0, 2.0], help="Renyi orders, comma separated")
    _common(p)
    p.set_defaults(func=cmd_scar)

    p = sub.add_parser("converge", help="distance of graph eigenvectors to a scar (CSV)")
    _graph_args(p)
    _scar_args(p)
    p.add_argument("--kmin", type=float, default=0.0)
    p.add_argument("--kmax", type=float, default=100.0)
    p.add_argument("--report-every", type=float, default=None)
    p.add_argument("--control", action="store_true", help="use lengths that host the scar exactly at k0")
    p.add_argument("--k0", type=float, default=1.0)
    _common(p)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("landscape", help="minimum doubled entropy over diag(1,e^ix1,e^ix2) F_3 (CSV)")
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--degeneracy-tol", type=float, default=None)
    p.add_argument("--top", type=int, default=10, help="minima listed in the summary")
    _common(p)
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("entropy", help="reduced-vector entropies against closed forms over B (CSV)")
    p.add_argument("--family", default="fourier", choices=("fourier", "et"))
    p.add_argument("--B-list", type=_ints, default=[100, 1000, 10000])
    p.add_argument("--kappa", type=float, default=0.7)
    p.add_argument("--eps2", type=_sign, default=1)
    _common(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("verify", help="run the invariant suites (JSON report)")
    p.add_argument("--only", action="append", help=f"suite(s) to run: {', '.join(vf.SUITES)}")
    p.add_argument("--graph", help="graph file whose explicit central matrix is checked for unitarity")
    _common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify" and args.only:
        bad = [s for chunk in args.only for s in chunk.split(",") if s and s not in vf.SUITES]
        if bad:
            print(f"error: unknown suite(s) {bad}; choose from {', '.join(vf.SUITES)}", file=sys.stderr)
            return EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, AdmissibilityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
