"""``pdo-lab`` command line: ``verify``, ``teleport`` and ``curve``.

Exit codes: 0 success, 1 usage or configuration error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from itertools import product

import numpy as np

from . import __version__
from .chsh import N_MAX, ChainMode, theory_curve
from .errors import PDOLabError
from .experiment import estimate_chain
from .operators import bloch_to_density, random_bloch
from .pdo import ChannelParams, channel_pdo, hs_inner, temporal_bell
from .teleport import choi_psd, correction_unitary, cp_constraint, teleport

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2

CSV_HEADER = ["mode", "n", "method", "S", "delta_S", "stderr"]
SEED_ENV = "PDO_LAB_SEED"

VERIFY_SAMPLES = 200
VERIFY_SEED = 20190101


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number in {text!r} (use '.' as the decimal point)") from None
    if not all(np.isfinite(vals)):
        raise argparse.ArgumentTypeError(f"non-finite value in {text!r}")
    return vals


def _fmt(x: float) -> str:
    return repr(float(x))


# --------------------------------------------------------------------------- verify


def run_checks(tolerance: float | None = None) -> list[dict]:
    """Invariant checks behind ``verify``; ``tolerance`` overrides every numeric tolerance."""
    t_orth = 1e-12 if tolerance is None else tolerance
    t_spec = 1e-9 if tolerance is None else tolerance
    t_id = 1e-10 if tolerance is None else tolerance
    t_w = 1e-12 if tolerance is None else tolerance
    checks = []

    basis = [temporal_bell(k) for k in range(1, 5)]
    worst = 0.0
    passed = 0
    for (j, a), (k, b) in product(enumerate(basis), repeat=2):
        err = abs(hs_inner(a, b) - (j == k))
        worst = max(worst, err)
        passed += err <= t_orth
    checks.append({"name": "orthogonality", "passed": passed, "total": 16, "max_error": worst, "tolerance": t_orth})

    expected = np.array([-0.5, 0.5, 0.5, 0.5])
    errs = [float(np.max(np.abs(r.eigenvalues() - expected))) for r in basis]
    checks.append({
        "name": "spectra", "passed": sum(e <= t_spec for e in errs), "total": 4,
        "max_error": max(errs), "tolerance": t_spec,
    })

    rng = np.random.default_rng(VERIFY_SEED)
    worst_state = worst_weight = 0.0
    passed = 0
    for _ in range(VERIFY_SAMPLES):
        r = random_bloch(rng)
        eta = _random_cp_params(rng)
        k = int(rng.integers(1, 5))
        out = teleport(bloch_to_density(r), k, channel_pdo(eta))
        u = correction_unitary(k)
        want = u @ bloch_to_density(eta.as_array() * r) @ u.conj().T
        e_state = float(np.max(np.abs(out.state - want)))
        e_weight = abs(out.weight - 0.25)
        worst_state, worst_weight = max(worst_state, e_state), max(worst_weight, e_weight)
        passed += e_state <= t_id and e_weight <= t_w
    checks.append({
        "name": "teleportation identity", "passed": passed, "total": VERIFY_SAMPLES,
        "max_error": worst_state, "max_weight_error": worst_weight, "tolerance": t_id,
    })

    grid = np.linspace(-1, 1, 21)
    agree = sum(
        cp_constraint(ChannelParams(x, y, z)) == choi_psd(ChannelParams(x, y, z))
        for x, y, z in product(grid, repeat=3)
    )
    checks.append({"name": "CP grid", "passed": int(agree), "total": grid.size**3})

    for c in checks:
        c["passed"] = int(c["passed"])
        c["ok"] = c["passed"] == c["total"]
    return checks


def _random_cp_params(rng: np.random.Generator) -> ChannelParams:
    while True:
        eta = ChannelParams.from_array(rng.uniform(-1, 1, 3))
        if cp_constraint(eta):
            return eta


def cmd_verify(args) -> int:
    checks = run_checks(args.tolerance)
    ok = all(c["ok"] for c in checks)
    if args.json:
        print(json.dumps({"ok": ok, "checks": checks}, indent=2))
    else:
        for c in checks:
            status = "PASS" if c["ok"] else "FAIL"
            extra = f"  max error {c['max_error']:.3e}" if "max_error" in c else ""
            print(f"{status}  {c['name']:<24} {c['passed']}/{c['total']}{extra}")
        by_name = {c["name"]: c for c in checks}
        print(
            f"{by_name['orthogonality']['passed']}/16 orthogonality, "
            f"{by_name['spectra']['passed']}/4 spectra, "
            f"identity {'OK' if by_name['teleportation identity']['ok'] else 'FAILED'}, "
            f"CP grid {by_name['CP grid']['passed']}/{by_name['CP grid']['total']}"
        )
    if not ok:
        failed = ", ".join(c["name"] for c in checks if not c["ok"])
        print(f"verification failed: {failed}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# --------------------------------------------------------------------------- teleport


def cmd_teleport(args) -> int:
    try:
        rho = bloch_to_density(args.bloch)
        eta = ChannelParams.from_array(args.eta)
    except PDOLabError as exc:
        raise UsageError(str(exc)) from exc
    is_cp = cp_constraint(eta)
    if not is_cp and not args.allow_non_cp:
        print(f"warning: resource is not CP: eta = {args.eta}; pass --allow-non-cp to run anyway", file=sys.stderr)
        return EXIT_USAGE
    out = teleport(rho, args.projector, channel_pdo(eta))
    bloch = [float(v) for v in out.bloch]
    if args.json:
        print(json.dumps({
            "bloch_in": list(args.bloch), "eta": list(args.eta), "projector": args.projector,
            "bloch_out": bloch, "weight": out.weight, "cp": is_cp,
        }))
    else:
        if not is_cp:
            print("warning: resource is not CP", file=sys.stderr)
        print(f"input bloch   {', '.join(_fmt(v) for v in args.bloch)}")
        print(f"resource eta  {', '.join(_fmt(v) for v in args.eta)}")
        print(f"projector     {args.projector}")
        print(f"output bloch  {', '.join(_fmt(v) for v in bloch)}")
        print(f"weight        {_fmt(out.weight)}")
        print(f"CP            {'yes' if is_cp else 'no'}")
    return EXIT_OK


# --------------------------------------------------------------------------- curve


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def curve_rows(mode, n_min, n_max, visibility, method, shots, seed) -> list[list[str]]:
    ns = range(n_min, n_max + 1)
    if method == "analytic":
        points = theory_curve(mode, ns, visibility)
    else:
        points = [estimate_chain(mode, n, visibility, shots, seed) for n in ns]
    return [
        [ChainMode(mode).value, str(p.n), method, _fmt(p.S), _fmt(p.delta_S), _fmt(p.stderr)]
        for p in points
    ]


def cmd_curve(args) -> int:
    if not 2 <= args.n_min <= args.n_max <= N_MAX:
        raise UsageError(f"need 2 <= n-min <= n-max <= {N_MAX}, got {args.n_min}..{args.n_max}")
    if not 0 <= args.visibility <= 1:
        raise UsageError(f"visibility {args.visibility} outside [0, 1]")
    if args.shots < 100:
        raise UsageError("--shots must be at least 100")
    seed = args.seed if args.seed is not None else _default_seed()
    if seed < 0:
        raise UsageError("seed must be non-negative")
    rows = curve_rows(args.mode, args.n_min, args.n_max, args.visibility, args.method, args.shots, seed)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    if args.out in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from exc
    return EXIT_OK


# --------------------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pdo-lab", description="Pseudo-density operator toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="run the PDO and teleportation invariant checks")
    p.add_argument("--tolerance", type=float, default=None, help="override every numeric tolerance")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("teleport", help="teleport a qubit state in time through a channel resource")
    p.add_argument("--bloch", type=_triple, required=True, help="input Bloch vector x,y,z")
    p.add_argument("--eta", type=_triple, default=(1.0, 1.0, 1.0), help="resource contraction eta_x,eta_y,eta_z")
    p.add_argument("--projector", type=int, choices=(1, 2, 3, 4), default=1)
    p.add_argument("--allow-non-cp", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_teleport)

    p = sub.add_parser("curve", help="write a chained-CHSH violation curve as CSV")
    p.add_argument("--mode", choices=[m.value for m in ChainMode], required=True)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=N_MAX)
    p.add_argument("--visibility", type=float, default=0.982, help="spatial visibility (default 0.982)")
    p.add_argument("--method", choices=("analytic", "montecarlo"), default="analytic")
    p.add_argument("--shots", type=int, default=100_000, help="shots per correlator term")
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV} or 0)")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_curve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pdo-lab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
