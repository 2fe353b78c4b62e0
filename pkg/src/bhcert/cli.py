"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 non-convergence within the
box budget, 3 internal assertion failure (an unsound certificate or a
closed-form floor that was not cleared).

Only lower bounds on the real constants are certified. The complex-side
checks compare estimates and can pass or come back inconclusive; they never
produce a certificate.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field

from . import __version__, boxbound, certify, families, normcalc, oracle, polycore
from .errors import BHCertError

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_INTERNAL = 0, 1, 2, 3
FORMATS = ("json", "csv", "svg")
CSV_HEADER = ["m", "n_vars", "ratio_lower", "closed_form", "ratio_lower^(1/m)"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    spec: str | None = None
    tol: float = boxbound.DEFAULT_TOL
    precision_bits: int = normcalc.DEFAULT_PRECISION_BITS
    grid: int = 64
    fmt: str = "json"
    out: str | None = None
    extra: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.tol > 0:
            raise UsageError("--tol must be > 0")
        if self.precision_bits < 64:
            raise UsageError("--precision-bits must be >= 64")
        if self.fmt not in FORMATS:
            raise UsageError(f"--format must be one of {', '.join(FORMATS)}")


# --------------------------------------------------------------------------
# Output helpers


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _parse_range(text: str) -> range:
    match = re.fullmatch(r"\s*(-?\d+)\s*(?:\.\.\s*(-?\d+)\s*)?", text)
    if not match:
        raise UsageError(f"cannot parse range {text!r}; expected a..b or a single integer")
    a = int(match.group(1))
    b = int(match.group(2)) if match.group(2) is not None else a
    return range(a, b + 1)


def _param(args: list[str], name: str) -> range:
    for a in args:
        if a.startswith(name + "="):
            return _parse_range(a[len(name) + 1:])
    raise UsageError(f"missing {name}=... in sweep arguments")


def sweep_specs(family: str, args: list[str]) -> list[families.FamilySpec]:
    """Expand ``R 2..10``, ``Rodd 3..7``, ``Q 1..3``, ``Qpow k=1 n=1..4``, ``P4pow 1..6``."""
    if family == "Qpow":
        return [families.FamilySpec("Q_tower_power", (k, n))
                for k in _param(args, "k") for n in _param(args, "n")]
    if len(args) != 1:
        raise UsageError(f"sweep {family} takes exactly one range argument")
    rng = _parse_range(args[0])
    if family == "R":
        return [families.FamilySpec("R_even", (m,)) for m in rng if m >= 2 and m % 2 == 0]
    if family == "Rodd":
        return [families.FamilySpec("R_odd", (m,)) for m in rng if m >= 3 and m % 2 == 1]
    if family == "Q":
        return [families.FamilySpec("Q_tower", (k,)) for k in rng]
    if family == "P4pow":
        return [families.FamilySpec("P4_power", (n,)) for n in rng]
    raise UsageError(f"unknown sweep family {family!r}; expected R, Rodd, Q, Qpow or P4pow")


def _root(cert: certify.BoundCertificate) -> float:
    return cert.ratio_lower ** (1.0 / cert.m)


def sweep_csv(result: certify.SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for c in result.certificates:
        closed = "" if c.closed_form_value is None else certify.fmt_nearest(c.closed_form_value)
        writer.writerow([c.m, c.n_vars, certify.fmt_down(c.ratio_lower), closed,
                         certify.fmt_nearest(_root(c))])
    for spec, msg in result.errors:
        writer.writerow(["", "", "FAILED", spec, msg])
    return buf.getvalue()


def sweep_svg(result: certify.SweepResult, ks=(1, 2, 3)) -> str:
    """Standalone SVG: ratio_lower^(1/m) against m on a log y-axis."""
    width, height, pad = 640, 400, 60
    points = [(c.m, _root(c)) for c in result.certificates]
    refs = [("1.17", 1.17), ("27^(1/8)", 27 ** 0.125), ("2", 2.0)]
    refs += [(f"2^(1-2^-{k})", certify.thm3_limit(k)) for k in ks]
    ys = [y for _, y in points] + [v for _, v in refs]
    y_lo, y_hi = math.log(min(ys) * 0.95), math.log(max(ys) * 1.05)
    ms = [m for m, _ in points] or [1, 2]
    x_lo, x_hi = min(ms) - 1, max(ms) + 1

    def sx(x):
        return pad + (x - x_lo) / (x_hi - x_lo) * (width - 2 * pad)

    def sy(y):
        return height - pad - (math.log(y) - y_lo) / (y_hi - y_lo) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="{width / 2:.1f}" y="{height - 20}" text-anchor="middle">m</text>',
           f'<text x="15" y="{height / 2:.1f}" transform="rotate(-90 15 {height / 2:.1f})" '
           f'text-anchor="middle">ratio_lower^(1/m) (log scale)</text>']
    for label, v in refs:
        y = sy(v)
        out.append(f'<line x1="{pad}" y1="{y:.2f}" x2="{width - pad}" y2="{y:.2f}" '
                   f'stroke="gray" stroke-dasharray="4 3"/>')
        out.append(f'<text x="{width - pad + 4}" y="{y + 4:.2f}" font-size="10">{label}</text>')
    for m in sorted(set(ms)):
        out.append(f'<text x="{sx(m):.2f}" y="{height - pad + 15}" text-anchor="middle" '
                   f'font-size="10">{m}</text>')
    if len(points) > 1:
        path = " ".join(f"{sx(m):.2f},{sy(y):.2f}" for m, y in points)
        out.append(f'<polyline points="{path}" fill="none" stroke="steelblue"/>')
    for m, y in points:
        out.append(f'<circle cx="{sx(m):.2f}" cy="{sy(y):.2f}" r="3" fill="steelblue"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# Commands


def cmd_family(cfg: RunConfig) -> int:
    spec = families.parse_spec(cfg.spec)
    p = families.build(spec)
    text = polycore.to_text(p)
    text += f"# terms {len(p)}  degree {polycore.degree(p)}  vars {p.n_vars}\n"
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_norms(cfg: RunConfig) -> int:
    spec = families.parse_spec(cfg.spec)
    p = families.build(spec)
    bh = normcalc.bh_exponent(spec.degree)
    payload = {
        "family": str(spec),
        "terms": len(p),
        "l1": certify.fmt_nearest(float(normcalc.coeff_l1(p))),
        "l2": normcalc.coeff_lp_norm(p, 2, cfg.precision_bits).to_dict(),
        "sup": certify.fmt_nearest(float(normcalc.coeff_sup(p))),
        "bh_exponent": str(bh),
        "bh": normcalc.coeff_lp_norm(p, bh.value, cfg.precision_bits).to_dict(),
    }
    _emit(_dumps(payload), cfg.out)
    return EXIT_OK


def cmd_supnorm(cfg: RunConfig) -> int:
    spec = families.parse_spec(cfg.spec)
    enc = boxbound.best_sup_enclosure(spec, cfg.tol)
    payload = {"family": str(spec), **enc.to_dict()}
    payload["lo"] = certify.fmt_down(enc.lo)
    payload["hi"] = certify.fmt_up(enc.hi)
    _emit(_dumps(payload), cfg.out)
    return EXIT_OK if enc.converged else EXIT_NONCONVERGED


def cmd_certify(cfg: RunConfig) -> int:
    cert = certify.certify_family(cfg.spec, cfg.tol, cfg.precision_bits)
    _emit(_dumps(cert.to_dict()), cfg.out)
    if not cert.sound():
        return EXIT_INTERNAL
    if not cert.denominator.converged:
        return EXIT_NONCONVERGED
    return EXIT_OK if cert.floor_cleared in (None, True) else EXIT_INTERNAL


def cmd_sweep(cfg: RunConfig) -> int:
    if not cfg.extra:
        raise UsageError("sweep needs a family and a range, e.g. 'sweep R 2..10'")
    family, args = cfg.extra[0], cfg.extra[1:]
    specs = sweep_specs(family, args)
    result = certify.sweep(specs, cfg.tol, cfg.precision_bits)
    if cfg.fmt == "csv":
        text = sweep_csv(result)
    elif cfg.fmt == "svg":
        ks = sorted({s.params[0] for s in specs}) if family == "Qpow" else (1, 2, 3)
        text = sweep_svg(result, ks)
    else:
        text = _dumps({"certificates": [c.to_dict() for c in result.certificates],
                       "errors": [{"family": s, "error": e} for s, e in result.errors]})
    _emit(text, cfg.out)
    if result.errors:
        return EXIT_INTERNAL
    if any(not c.denominator.converged for c in result.certificates):
        return EXIT_NONCONVERGED
    if any(c.floor_cleared is False or not c.sound() for c in result.certificates):
        return EXIT_INTERNAL
    return EXIT_OK


def check_items(max_vars: int = 4, max_degree: int = 8) -> list[families.FamilySpec]:
    return families.builtin_specs(max_vars=max_vars, max_degree=max_degree)


def cmd_check(cfg: RunConfig) -> int:
    kind = cfg.extra[0] if cfg.extra else ""
    lines = []
    if kind == "visser":
        for spec in check_items():
            p = families.build(spec)
            sup = boxbound.best_sup_enclosure(spec, cfg.tol)
            res = certify.check_visser(p, spec.degree, cfg.grid, sup=sup)
            bound = 2 ** (spec.degree - 1)
            lines.append(f"{spec}: ratio {certify.fmt_nearest(res.ratio)} <= {bound}: {res.status}")
    elif kind == "parseval":
        for spec in check_items():
            p = families.build(spec)
            ok = certify.check_parseval(p, cfg.grid)
            l2 = math.sqrt(normcalc.coeff_l2_norm_sq(p))
            lines.append(f"{spec}: |P|_2 {certify.fmt_nearest(l2)} <= torus estimate: "
                         f"{'pass' if ok else certify.INCONCLUSIVE}")
    elif kind == "identities":
        n = 50
        for name, fn in (("binomial squares", oracle.binom_identity_check),
                         ("odd products", oracle.odd_product_check),
                         ("binomial maximum", oracle.binomial_max_check)):
            lines.append(f"{name} n <= {n}: {'pass' if fn(n) else 'FAIL'}")
    else:
        raise UsageError("check needs one of: visser, parseval, identities")
    _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_oracle(cfg: RunConfig) -> int:
    what = cfg.extra[0] if cfg.extra else ""
    rest = cfg.extra[1:]
    if what == "grid" and len(rest) >= 1:
        points = int(rest[1]) if len(rest) > 1 else 101
        value = oracle.grid_sup_lower(families.build(rest[0]), points)
        text = f"{rest[0]} grid {points}: {certify.fmt_down(value)}\n"
    elif what == "expand" and len(rest) == 1:
        spec = families.parse_spec(rest[0])
        same = oracle.same_coefficients(families.build(spec), oracle.naive_expand(spec))
        text = f"{spec}: naive expansion {'matches' if same else 'DIFFERS'}\n"
    elif what == "stirling" and len(rest) == 1:
        n = int(rest[0])
        text = f"stirling gap n={n}: {certify.fmt_nearest(oracle.stirling_gap(n))}\n"
    else:
        raise UsageError("oracle needs: grid SPEC [POINTS] | expand SPEC | stirling N")
    _emit(text, cfg.out)
    return EXIT_OK


COMMANDS = {
    "family": cmd_family,
    "norms": cmd_norms,
    "supnorm": cmd_supnorm,
    "certify": cmd_certify,
    "sweep": cmd_sweep,
    "check": cmd_check,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=boxbound.DEFAULT_TOL,
                        help="target sup-norm enclosure width (default 1e-9)")
    common.add_argument("--precision-bits", type=int, default=normcalc.DEFAULT_PRECISION_BITS,
                        help="fractional bits for rational powers (default 128)")
    common.add_argument("--grid", type=int, default=64, help="torus grid points per dimension")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default=None)
    common.add_argument("--out", help="write output to this file instead of stdout")

    parser = _Parser(prog="bhcert", description="Certified lower bounds for real Bohnenblust-Hille constants.",
                     epilog="The box budget can be overridden with BHCERT_BUDGET.")
    parser.add_argument("--version", action="version", version=f"bhcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser,
                                metavar="{family,norms,supnorm,certify,sweep,check}")
    for name, helptext in (("family", "print a family member's coefficients"),
                           ("norms", "coefficient norms of a family member"),
                           ("supnorm", "certified sup-norm enclosure"),
                           ("certify", "emit a lower-bound certificate as JSON")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("spec", help="R:m, Q:k, Qpow:k,n or P4pow:n")
    p = sub.add_parser("sweep", parents=[common], help="certify a range of family members")
    p.add_argument("extra", nargs="+", metavar="ARG",
                   help="R 2..10 | Rodd 3..5 | Q 1..3 | Qpow k=1 n=1..4 | P4pow 1..6")
    p = sub.add_parser("check", parents=[common], help="visser, parseval or identities")
    p.add_argument("extra", nargs=1, metavar="KIND", choices=["visser", "parseval", "identities"])
    p = sub.add_parser("oracle", parents=[common])
    p.add_argument("extra", nargs="+", metavar="ARG")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    default_fmt = "csv" if args.command == "sweep" else "json"
    try:
        cfg = RunConfig(
            command=args.command,
            spec=getattr(args, "spec", None),
            tol=args.tol,
            precision_bits=args.precision_bits,
            grid=args.grid,
            fmt=args.fmt or default_fmt,
            out=args.out,
            extra=list(getattr(args, "extra", []) or []),
        )
        return COMMANDS[cfg.command](cfg)
    except (UsageError, BHCertError) as exc:
        print(f"bhcert: error: {exc}", file=sys.stderr)
        if getattr(args, "spec", None) is not None:
            print("  family specs look like R:4, Q:2, Qpow:1,3 or P4pow:2", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"bhcert: internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
