"""Command-line front end.

Subcommands: analyze (bounds, conjunction verdicts, shortlist), profile
(confidence-distribution CSV/SVG), simulate (power study), oracle (full
enumeration dump for cross-validation).  Reports are deterministic: JSON
keys are sorted, floats carry 12 significant digits, and identical inputs
with identical flags produce byte-identical output.

Exit codes: 0 success, 2 input or validation error, 3 capacity exceeded,
4 incompatible request (congruence restrictions at beyond-enumeration
scale).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from .closure import (
    CapacityError,
    DEFAULT_EXACT_CAP,
    enumerate_closure,
    pairwise_congruence,
    rejection_table,
)
from .bounds import t_alpha_exact, t_alpha_shortcut
from .family import (
    HypothesisFamily,
    IndexSet,
    ParseError,
    as_alpha,
    parse_family,
    resolve_set,
)
from .localtests import BUILTIN_TESTS, get_test
from .profile import confidence_profile, pmf_csv, profile_summary
from .shortlist import DEFAULT_SHORTLIST_CAP, minimal_transversals
from .simulate import SimConfig, run_power_study
from .svg import pmf_bar_chart

ORACLE_CAP = 20


class IncompatibleRequest(RuntimeError):
    """Flag combination that no engine can honour."""


def _thread_cap() -> int | None:
    """MTCHERRY_THREADS caps engine workers; 0 means auto.

    The built-in engines are single-pass vectorized code, so today the cap
    is validated and nothing more.
    """
    raw = os.environ.get("MTCHERRY_THREADS")
    if raw is None or raw == "":
        return None
    try:
        val = int(raw)
    except ValueError:
        raise ValueError(
            f"MTCHERRY_THREADS must be a nonnegative integer, got {raw!r}"
        ) from None
    if val < 0:
        raise ValueError(f"MTCHERRY_THREADS must be nonnegative, got {val}")
    return val


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _emit_json(report: dict, path: str | None) -> None:
    _emit(json.dumps(_round_floats(report), sort_keys=True, indent=2) + "\n", path)


def _load_family(path: str) -> tuple[HypothesisFamily, str]:
    with open(path, "rb") as handle:
        raw = handle.read()
    family = parse_family(raw.decode("utf-8"))
    return family, hashlib.sha256(raw).hexdigest()


def _labels_of(family: HypothesisFamily, s: IndexSet) -> list[str]:
    return [family.labels[i - 1] for i in s.indices]


def _parse_sets(family: HypothesisFamily, specs: list[str] | None) -> list[IndexSet]:
    if not specs:
        return [IndexSet.full(family.n)]
    out = []
    for spec in specs:
        labels = [x.strip() for x in spec.split(",") if x.strip()]
        if not labels:
            raise ValueError(f"empty hypothesis set in --set {spec!r}")
        out.append(resolve_set(family, labels))
    return out


def _parse_congruence(spec: str):
    head, sep, tail = spec.partition(":")
    if head != "pairwise" or not sep:
        raise ValueError(
            f"unsupported congruence {spec!r}; expected pairwise:<k>"
        )
    try:
        k = int(tail)
    except ValueError:
        raise ValueError(f"congruence needs an integer k, got {tail!r}") from None
    return pairwise_congruence(k)


def cmd_analyze(args: argparse.Namespace) -> int:
    family, digest = _load_family(args.input)
    test = get_test(args.test)
    alpha = as_alpha(args.alpha)
    n = family.n
    congruence = _parse_congruence(args.congruence) if args.congruence else None
    sets = _parse_sets(family, args.set)
    conjunctions = sorted(set(args.conjunction or []))
    for u in conjunctions:
        if u < 1:
            raise ValueError(f"conjunction count must be positive, got {u}")

    if congruence is not None and n > args.exact_cap:
        raise IncompatibleRequest(
            f"congruence restrictions need exact enumeration, but n={n} "
            f"exceeds the exact cap {args.exact_cap}"
        )
    if args.shortlist and n > args.exact_cap:
        raise CapacityError(
            f"shortlist needs the defining sets, but n={n} exceeds the "
            f"exact cap {args.exact_cap}"
        )
    engine = "exact" if congruence is not None or args.shortlist else "shortcut"

    defining = None
    if engine == "exact":
        defining = enumerate_closure(
            family, test, alpha, congruence=congruence, exact_cap=args.exact_cap
        )

    records = []
    for r in sets:
        if engine == "exact":
            rep = t_alpha_exact(defining, r)
        else:
            rep = t_alpha_shortcut(family, test, alpha, r)
        prof = confidence_profile(
            family,
            test,
            r=r,
            method=engine,
            congruence=congruence,
            exact_cap=args.exact_cap,
        )
        summary = profile_summary(prof, alpha)
        verdicts = []
        for u in conjunctions:
            if u > r.size:
                raise ValueError(
                    f"conjunction count {u} exceeds the set size {r.size}"
                )
            verdicts.append({"u": u, "verdict": "reject" if rep.t < u else "retain"})
        records.append(
            {
                "labels": _labels_of(family, r),
                "t": rep.t,
                "f": rep.f,
                "method": rep.method,
                "estimate_median": summary.estimate_median,
                "adjusted_p_all_false": summary.adjusted_p_all_false,
                "conjunctions": verdicts,
            }
        )

    report = {
        "version": __version__,
        "input": {"n": n, "sha256": digest},
        "test": test.kind,
        "alpha": float(alpha),
        "engine": engine,
        "congruence": args.congruence,
        "sets": records,
    }
    if args.shortlist:
        sl = minimal_transversals(defining, cap=args.shortlist_cap)
        report["shortlist"] = {
            "sets": [_labels_of(family, s) for s in sl.sets],
            "truncated": sl.truncated,
        }
    _emit_json(report, args.out)
    return 0


def cmd_profile(args: argparse.Namespace) -> int:
    family, _ = _load_family(args.input)
    test = get_test(args.test)
    sets = _parse_sets(family, [args.set] if args.set else None)
    prof = confidence_profile(family, test, r=sets[0], method="shortcut")
    _emit(pmf_csv(prof), args.csv)
    if args.svg:
        _emit(pmf_bar_chart(prof), args.svg)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    config = SimConfig(
        m_values=tuple(int(x) for x in args.m.split(",") if x.strip()),
        s=args.sparse,
        mu=args.mu,
        alpha=args.alpha,
        reps=args.reps,
        tests=tuple(x.strip() for x in args.tests.split(",") if x.strip()),
        seed=args.seed,
    )
    result = run_power_study(config)
    _emit(result.to_csv(), args.out)
    for cell in result.cells:
        sys.stderr.write(
            f"m={cell.m:>6}  {cell.test:<11}  power={cell.power:.4f}  "
            f"se={cell.se:.4f}\n"
        )
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    family, digest = _load_family(args.input)
    test = get_test(args.test)
    alpha = as_alpha(args.alpha)
    if family.n > ORACLE_CAP:
        raise CapacityError(
            f"oracle enumerates every subset; n={family.n} exceeds {ORACLE_CAP}"
        )
    defining = enumerate_closure(family, test, alpha, exact_cap=ORACLE_CAP)
    report = {
        "version": __version__,
        "input": {"n": family.n, "sha256": digest},
        "test": test.kind,
        "alpha": float(alpha),
        "defining_sets": [_labels_of(family, s) for s in defining.sets],
    }
    if args.dump_table:
        report["table"] = [
            {
                "labels": _labels_of(family, s),
                "local_p": p,
                "rejected": rejected,
            }
            for s, p, rejected in rejection_table(
                family, test, alpha, exact_cap=ORACLE_CAP
            )
        ]
    _emit_json(report, args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtcherry",
        description=(
            "Simultaneous confidence bounds on the number of true and false "
            "hypotheses in arbitrary sets, via closed testing."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="bounds, conjunction verdicts, shortlist")
    pa.add_argument("--input", required=True, help="CSV file with header id,p")
    pa.add_argument("--test", choices=sorted(BUILTIN_TESTS), default="simes")
    pa.add_argument("--alpha", type=float, default=0.05)
    pa.add_argument(
        "--set",
        action="append",
        metavar="LABELS",
        help="comma-separated hypothesis labels; repeatable; default full family",
    )
    pa.add_argument(
        "--congruence",
        metavar="pairwise:K",
        help="restricted-combination structure of the family",
    )
    pa.add_argument("--exact-cap", type=int, default=DEFAULT_EXACT_CAP)
    pa.add_argument("--shortlist", action="store_true")
    pa.add_argument("--shortlist-cap", type=int, default=DEFAULT_SHORTLIST_CAP)
    pa.add_argument(
        "--conjunction",
        action="append",
        type=int,
        metavar="U",
        help="verdict on 'at least U true' in each requested set; repeatable",
    )
    pa.add_argument("--out", help="write the JSON report here instead of stdout")
    pa.set_defaults(func=cmd_analyze)

    pp = sub.add_parser("profile", help="confidence-distribution CSV and SVG")
    pp.add_argument("--input", required=True)
    pp.add_argument("--test", choices=sorted(BUILTIN_TESTS), default="simes")
    pp.add_argument("--set", metavar="LABELS")
    pp.add_argument("--csv", help="write the PMF CSV here instead of stdout")
    pp.add_argument("--svg", help="also write an SVG bar chart here")
    pp.set_defaults(func=cmd_profile)

    ps = sub.add_parser("simulate", help="power study CSV")
    ps.add_argument("--m", default="8,32,128,512,1024", help="family sizes")
    ps.add_argument("--sparse", type=int, default=2, help="false nulls per family")
    ps.add_argument("--mu", type=float, default=5.0)
    ps.add_argument("--alpha", type=float, default=0.05)
    ps.add_argument("--reps", type=int, default=2000)
    ps.add_argument("--tests", default="bonferroni,simes,fisher")
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out", help="write the power CSV here instead of stdout")
    ps.set_defaults(func=cmd_simulate)

    po = sub.add_parser("oracle", help="full-enumeration dump for cross-checks")
    po.add_argument("--input", required=True)
    po.add_argument("--test", choices=sorted(BUILTIN_TESTS), default="simes")
    po.add_argument("--alpha", type=float, default=0.05)
    po.add_argument(
        "--dump-table",
        action="store_true",
        help="include every subset's local p-value and verdict",
    )
    po.add_argument("--out", help="write the JSON report here instead of stdout")
    po.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _thread_cap()
        return args.func(args)
    except (ParseError, ValueError, OSError, UnicodeDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except CapacityError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except IncompatibleRequest as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
