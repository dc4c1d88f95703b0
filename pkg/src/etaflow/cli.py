"""Command-line front end.

Every command emits a deterministic report (exact rational strings, no
timestamps) as JSON or two-column CSV.  Exit codes: 0 success, 1 config
or math error, 2 indeterminate spectral results.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .catalog import ConfigError, resolve_manifold
from .eta import (
    adiabatic_limit_eta,
    aps_index,
    corollary_check,
    eta_invariant,
    transgression_raw,
    transgression_term,
)
from .exact import (
    GaussianRational,
    SqrtValue,
    parse_rational,
    poly_integrate_delta,
    rational_str,
)
from .ring import exp_nilpotent, integrate_top
from .series import (
    CONVENTION_PAPER_I,
    CONVENTION_REAL,
    a_hat_from_roots,
    default_order,
    eta_hat_series_from_alpha,
    eta_hat_series_integer,
    omega_forms,
    series_eta_hat,
    series_p,
    series_p_prime,
)
from .spectral import (
    IndeterminateSpectralFlow,
    NAKANO_ONLY,
    ON_UNKNOWN_SKIP,
    SF_SIGN_PAPER,
    SF_SIGN_STANDARD,
    SpectralWindowError,
    SpectrumDataError,
    UnknownCohomologyError,
    kernel_dimension,
    spectral_flow,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INDETERMINATE = 2


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _add_common(sp, *, r=False, eps=False, order=False, mode=False,
                convention=False, sf_sign=False):
    sp.add_argument("--manifold", required=True,
                    help="builtin name (cp1xcp1, cp1x4, hyp:n=4,d=8) or config path")
    if r:
        sp.add_argument("--r", default="0", help="twist parameter, exact rational")
    if eps:
        sp.add_argument("--eps", required=True, help="deformation parameter > 0")
    if order:
        sp.add_argument("--order", type=int, default=None,
                        help="series truncation order (default 2n+2)")
    if mode:
        sp.add_argument("--mode", choices=["nakano", "explicit"], default="nakano")
    if convention:
        sp.add_argument("--convention",
                        choices=[CONVENTION_REAL, CONVENTION_PAPER_I],
                        default=CONVENTION_REAL)
    if sf_sign:
        sp.add_argument("--sf-sign", choices=[SF_SIGN_PAPER, SF_SIGN_STANDARD],
                        default=SF_SIGN_PAPER)
    sp.add_argument("--out", default=None, help="write the report to this path")
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--decimal", type=int, default=None,
                    help="add decimal display fields with this many digits")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="etaflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("eta", help="full eta-invariant decomposition"),
                r=True, eps=True, order=True, mode=True, convention=True,
                sf_sign=True)
    _add_common(sub.add_parser("adiabatic-limit", help="small-eps limit term"),
                r=True, order=True)
    _add_common(sub.add_parser("transgression", help="transgression term"),
                r=True, eps=True, order=True, convention=True)
    _add_common(sub.add_parser("spectral-flow", help="certified spectral flow"),
                r=True, eps=True, mode=True, sf_sign=True)
    _add_common(sub.add_parser("aps-index", help="boundary index on the disc bundle"),
                eps=True)
    _add_common(sub.add_parser("kernel-dim", help="kernel dimension at delta = eps"),
                r=True, eps=True, mode=True)
    ci = sub.add_parser("check-identities", help="run the symbolic identity suite")
    _add_common(ci, r=True, order=True)
    ci.add_argument("--dump-series", action="store_true",
                    help="include the characteristic series in the report")
    _add_common(sub.add_parser("counterexample",
                               help="exhibit the general-type crossing"),
                r=True, eps=True, sf_sign=True)
    return parser


def _model_for(entry, mode: str):
    model = entry.model
    if mode == "explicit":
        if not model.spectrum.is_tabulated:
            raise ConfigError(
                "explicit mode needs a 'laplacian_table' in the manifold config"
            )
        return model
    if model.spectrum.is_tabulated:
        # nakano mode deliberately ignores a shipped table
        model = copy.copy(model)
        model.spectrum = NAKANO_ONLY
    return model


def _provenance(entry, args, extra=None):
    block = {
        "schema_version": SCHEMA_VERSION,
        "generator": f"etaflow {__version__}",
        "manifold": entry.name,
    }
    for key in ("mode", "convention", "sf_sign"):
        value = getattr(args, key, None)
        if value is not None:
            block[key] = value
    block.update(extra or {})
    return block


def _decimal_str(value: Fraction, digits: int) -> str:
    scaled = round(value * 10**digits)
    sign = "-" if scaled < 0 else ""
    body = str(abs(scaled)).rjust(digits + 1, "0")
    if digits == 0:
        return sign + body
    return f"{sign}{body[:-digits]}.{body[-digits:]}"


def _add_decimals(result: dict, fields, digits):
    if digits is None:
        return
    for field in fields:
        value = result.get(field)
        if isinstance(value, str):
            try:
                result[field + "_decimal"] = _decimal_str(parse_rational(value), digits)
            except ValueError:
                pass


def _scalar_json(value):
    if isinstance(value, GaussianRational):
        return value.to_json()
    if isinstance(value, SqrtValue):
        return value.to_json()
    return rational_str(value)


def _cmd_eta(args):
    entry = resolve_manifold(args.manifold)
    manifold = entry.require_manifold()
    model = _model_for(entry, args.mode)
    res = eta_invariant(
        manifold, model, parse_rational(args.r), parse_rational(args.eps),
        convention=args.convention, sf_sign=args.sf_sign, order=args.order,
    )
    result = res.to_json()
    _add_decimals(result, ("total", "adiabatic_term", "transgression_term"),
                  args.decimal)
    code = EXIT_OK if res.flow_report.is_exact else EXIT_INDETERMINATE
    return result, _provenance(entry, args, {"convention_constant": "1"}), code


def _cmd_adiabatic(args):
    entry = resolve_manifold(args.manifold)
    manifold = entry.require_manifold()
    r = parse_rational(args.r)
    value = adiabatic_limit_eta(manifold, r, args.order)
    result = {"r": rational_str(r), "value": rational_str(value)}
    _add_decimals(result, ("value",), args.decimal)
    return result, _provenance(entry, args), EXIT_OK


def _cmd_transgression(args):
    entry = resolve_manifold(args.manifold)
    manifold = entry.require_manifold()
    r = parse_rational(args.r)
    eps = parse_rational(args.eps)
    value = transgression_term(manifold, r, eps, args.convention, order=args.order) \
        if args.convention == CONVENTION_REAL else \
        transgression_raw(manifold, r, eps, args.convention, args.order)
    result = {
        "r": rational_str(r),
        "eps": rational_str(eps),
        "convention": args.convention,
        "value": _scalar_json(value),
    }
    _add_decimals(result, ("value",), args.decimal)
    return result, _provenance(entry, args, {"convention_constant": "1"}), EXIT_OK


def _cmd_spectral_flow(args):
    entry = resolve_manifold(args.manifold)
    model = _model_for(entry, args.mode)
    report = spectral_flow(
        model, parse_rational(args.r), parse_rational(args.eps),
        sf_sign=args.sf_sign,
    )
    code = EXIT_OK if report.is_exact else EXIT_INDETERMINATE
    return report.to_json(), _provenance(entry, args), code


def _cmd_aps_index(args):
    entry = resolve_manifold(args.manifold)
    eps = parse_rational(args.eps)
    n = entry.model.n
    table = entry.model.table
    value = aps_index(n, table, eps)
    contributing = []
    for p in range(n + 1):
        kv = -eps * (Fraction(p) - Fraction(n, 2))
        if kv.denominator == 1:
            h = table.h(p, int(kv))
            if h:
                contributing.append({"p": p, "k": int(kv), "h": h})
    result = {
        "eps": rational_str(eps),
        "index": rational_str(value),
        "contributing": contributing,
        "resonant": bool(contributing),
    }
    _add_decimals(result, ("index",), args.decimal)
    return result, _provenance(entry, args), EXIT_OK


def _cmd_kernel_dim(args):
    entry = resolve_manifold(args.manifold)
    model = _model_for(entry, args.mode)
    r = parse_rational(args.r)
    eps = parse_rational(args.eps)
    value = kernel_dimension(model, r, eps)
    result = {
        "r": rational_str(r),
        "eps": rational_str(eps),
        "kernel_dimension": value,
    }
    return result, _provenance(entry, args), EXIT_OK


def _identity_suite(manifold, r, order):
    """Deterministic symbolic self-checks on one catalog manifold."""
    ring = manifold.ring
    order = order or default_order(ring)
    c = manifold.c
    roots = manifold.chern_roots
    checks = []

    def check(name, fn):
        try:
            ok = bool(fn())
            note = ""
        except Exception as exc:  # report, never crash the suite
            ok = False
            note = f"{type(exc).__name__}: {exc}"
        item = {"name": name, "pass": ok}
        if note:
            item["note"] = note
        checks.append(item)

    one = exp_nilpotent(c * 0)
    check("exp_inverse",
          lambda: exp_nilpotent(c) * exp_nilpotent(-c) == one)
    check("series_p_derivative",
          lambda: series_p_prime(12) == series_p(13).derivative())
    check("eta_hat_integer_is_average_of_one_sided_limits",
          lambda: eta_hat_series_integer(12) * 2
          == eta_hat_series_from_alpha(1, 12) + eta_hat_series_from_alpha(-1, 12))
    check("eta_hat_at_r_constant_term",
          lambda: series_eta_hat(r, order).coeff(0)
          == (0 if r.denominator == 1 else 1 - 2 * (r - math.floor(r))))
    check("a_hat_degrees_divisible_by_four",
          lambda: all(d % 4 == 0
                      for d in a_hat_from_roots(ring, roots, order).degrees()))

    for convention in (CONVENTION_REAL, CONVENTION_PAPER_I):
        omega0, omega2 = omega_forms(roots, c, convention, order)
        check(f"transgression_derivative_{convention}",
              lambda o0=omega0, o2=omega2:
              o0.derivative_delta() == c * 2 * o2)

    def ftc(rr, ee):
        omega0, omega2 = omega_forms(roots, c, order=order)
        erc = exp_nilpotent(c * rr)
        lhs = poly_integrate_delta(
            integrate_top(c * 2 * omega2 * exp_nilpotent(omega0) * erc), ee)
        ahat = a_hat_from_roots(ring, roots, order)
        rhs = integrate_top((exp_nilpotent(omega0.subs_delta(ee)) - ahat) * erc)
        return lhs == rhs

    for rr, ee in ((Fraction(0), Fraction(1, 3)), (Fraction(1, 2), Fraction(1))):
        check(f"fundamental_theorem_r={rr}_eps={ee}",
              lambda rr=rr, ee=ee: ftc(rr, ee))

    if manifold.n % 2 == 0:
        check("corollary_parity",
              lambda: corollary_check(manifold, order).both_terms_zero)
    return checks


def _cmd_check_identities(args):
    entry = resolve_manifold(args.manifold)
    manifold = entry.require_manifold()
    r = parse_rational(args.r)
    checks = _identity_suite(manifold, r, args.order)
    result = {"checks": checks, "all_pass": all(c["pass"] for c in checks)}
    if args.dump_series:
        order = args.order or default_order(manifold.ring)
        result["series"] = {
            "order": order,
            "p": series_p(order).to_json(),
            "p_prime": series_p_prime(order).to_json(),
            "eta_hat": series_eta_hat(r, order).to_json(),
            "r": rational_str(r),
        }
    code = EXIT_OK if result["all_pass"] else EXIT_ERROR
    return result, _provenance(entry, args), code


def _cmd_counterexample(args):
    entry = resolve_manifold(args.manifold)
    report = spectral_flow(
        entry.model, parse_rational(args.r), parse_rational(args.eps),
        sf_sign=args.sf_sign, on_unknown=ON_UNKNOWN_SKIP,
    )
    result = report.to_json()
    result["crossing_found"] = bool(report.crossings)
    result["spectral_flow_nonzero"] = report.total_paper != 0
    if report.partial:
        result["note"] = (
            "cohomology table is partial; totals cover tabulated entries only"
        )
    return result, _provenance(entry, args), EXIT_OK


_COMMANDS = {
    "eta": _cmd_eta,
    "adiabatic-limit": _cmd_adiabatic,
    "transgression": _cmd_transgression,
    "spectral-flow": _cmd_spectral_flow,
    "aps-index": _cmd_aps_index,
    "kernel-dim": _cmd_kernel_dim,
    "check-identities": _cmd_check_identities,
    "counterexample": _cmd_counterexample,
}


def _flatten(value, prefix=""):
    rows = []
    if isinstance(value, dict) and value:
        for key in sorted(value):
            rows.extend(_flatten(value[key], f"{prefix}{key}."))
    elif isinstance(value, list) and value:
        for i, item in enumerate(value):
            rows.extend(_flatten(item, f"{prefix}{i}."))
    else:
        # empty containers serialize as JSON leaves so CSV round-trips
        rows.append((prefix[:-1], json.dumps(value)))
    return rows


def payload_to_csv(payload: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in _flatten(payload):
        writer.writerow([key, value])
    return buf.getvalue()


def payload_to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def load_report(text: str, fmt: str = "json") -> dict:
    """Parse a report back into the payload dict (JSON and CSV agree)."""
    if fmt == "json":
        return json.loads(text)
    root = {}
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["key", "value"]:
        raise ValueError("not an etaflow CSV report")
    entries = [(row[0].split("."), json.loads(row[1])) for row in reader]
    for path, value in entries:
        node = root
        for i, seg in enumerate(path[:-1]):
            node = node.setdefault(seg, {})
        node[path[-1]] = value

    def listify(node):
        if not isinstance(node, dict):
            return node
        node = {k: listify(v) for k, v in node.items()}
        if node and all(k.isdigit() for k in node):
            return [node[k] for k in sorted(node, key=int)]
        return node

    return listify(root)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliError as exc:
        print(f"etaflow: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        result, provenance, code = _COMMANDS[args.command](args)
    except IndeterminateSpectralFlow as exc:
        print(f"etaflow: indeterminate: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except (ConfigError, UnknownCohomologyError, SpectralWindowError,
            SpectrumDataError, ValueError, OSError) as exc:
        print(f"etaflow: {exc}", file=sys.stderr)
        return EXIT_ERROR
    payload = {
        "command": args.command,
        "provenance": provenance,
        "result": result,
    }
    text = payload_to_json(payload) if args.format == "json" else payload_to_csv(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
