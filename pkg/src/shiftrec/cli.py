"""Command-line harness: every experiment as a reproducible subcommand.

Exit status: 0 when all bounds and certificates pass, 1 when a measure
bound is violated (a construction bug or a tampered certificate), 2 for
usage or data errors.  Identical configurations produce byte-identical
output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .bitseq import ExplicitPrefixSource, FileSource, PseudorandomSource, Word
from .certificates import (
    TestCertificate,
    certificates_from_json,
    verify_certificate,
)
from .dyadic import Dyadic
from .errors import (
    BoundViolationError,
    BudgetExceededError,
    DepthExhaustedError,
    InapplicableBoundError,
    InsufficientDataError,
    NoCertificateError,
    PrecisionError,
)
from .kurtz import kurtz_capture, kurtz_stage_set
from .measure import ClopenSet, StagedCoEnumeration
from .mltest import ml_escape_level, ml_run
from .multidim import (
    ArrayClopenSet,
    ArraySample,
    ArrayStagedCoEnumeration,
    SeededGridSource,
    grid_find_witness,
    grid_kurtz_stage_set,
    grid_ml_enumerate_C,
)
from .recurrence import (
    Pi01Target,
    RecurrenceQuery,
    batch_statistics,
    find_witness,
)
from .rotation import (
    RotationSystem,
    cf_accelerated_return,
    default_precision,
    dirichlet_ceiling,
    find_multi_return,
    verify_return,
)

_USAGE_ERRORS = (
    ValueError,
    OSError,
    KeyError,
    InsufficientDataError,
    NoCertificateError,
    BudgetExceededError,
    DepthExhaustedError,
    PrecisionError,
    InapplicableBoundError,
)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cert_csv(certs: list[TestCertificate]) -> str:
    def fmt(value) -> str:
        if isinstance(value, (list, tuple)):
            return "+".join(str(v) for v in value)
        return str(value)

    rows = ["kind,label,word_count,exact_measure,required_bound,pass"]
    for c in certs:
        label = ";".join(f"{k}={fmt(v)}" for k, v in sorted(c.parameters.items()))
        rows.append(
            f"{c.kind},{label},{len(c.words)},{c.exact_measure},{c.required_bound},"
            f"{str(c.passes).lower()}"
        )
    return "\n".join(rows) + "\n"


def _load_class_file(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    first = next((ln.strip() for ln in text.splitlines() if ln.strip()), "")
    if first.startswith("granularity"):
        return ClopenSet.from_text(text)
    if first.startswith("dimension"):
        return _array_coenum_from_text(text)
    if first.startswith("stage"):
        return StagedCoEnumeration.from_text(text)
    raise ValueError(f"unrecognized class file (first line {first!r})")


def _array_coenum_from_text(text: str) -> ArrayStagedCoEnumeration:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines[0].startswith("dimension"):
        raise ValueError("array co-enumeration must start with 'dimension <k>'")
    dim = int(lines[0].split()[1])
    stages: dict[int, set[ArraySample]] = {}
    for ln in lines[1:]:
        if not ln.startswith("stage"):
            raise ValueError(f"bad array co-enumeration line: {ln!r}")
        head, _, rest = ln.partition(":")
        t = int(head.split()[1])
        stages.setdefault(t, set()).update(
            ArraySample.from_bit_string(dim, t, tok) for tok in rest.split()
        )
    return ArrayStagedCoEnumeration(stages, dimension=dim)


def _resolve_target(args):
    if getattr(args, "clopen", None):
        return ClopenSet.from_strings(args.clopen.split(","))
    if getattr(args, "class_file", None):
        loaded = _load_class_file(args.class_file)
        if isinstance(loaded, ClopenSet):
            return loaded
        if isinstance(loaded, StagedCoEnumeration):
            budget = args.stage_max if args.stage_max is not None else loaded.max_stage
            return Pi01Target(loaded, budget)
        raise ValueError("grid class files only apply to the grid subcommand")
    raise ValueError("no target given: use --clopen or --class-file")


def _resolve_coenum(args) -> StagedCoEnumeration:
    if getattr(args, "clopen", None):
        clopen = ClopenSet.from_strings(args.clopen.split(","))
        return StagedCoEnumeration.from_words(clopen.complement().words)
    if getattr(args, "class_file", None):
        loaded = _load_class_file(args.class_file)
        if isinstance(loaded, StagedCoEnumeration):
            return loaded
        if isinstance(loaded, ClopenSet):
            return StagedCoEnumeration.from_words(loaded.complement().words)
    raise ValueError("no co-enumeration given: use --class-file or --clopen")


def _single_source(args):
    if args.bits is not None:
        return ExplicitPrefixSource(Word.from_string(args.bits), 0)
    if args.bits_file is not None:
        return FileSource(args.bits_file)
    if args.seed is not None:
        return PseudorandomSource(args.seed[0])
    return None


def _seed_list(args) -> list[int] | None:
    seeds: list[int] = []
    if args.seed:
        seeds.extend(args.seed)
    if args.seeds_file:
        with open(args.seeds_file, "r", encoding="utf-8") as fh:
            seeds.extend(int(tok) for tok in fh.read().split())
    return seeds or None


def _cmd_recur(args) -> int:
    target = _resolve_target(args)
    n_max = args.n_max if args.n_max is not None else 100
    k = args.k if args.k is not None else 1
    if args.bits is not None or args.bits_file is not None:
        source = _single_source(args)
        report = find_witness(RecurrenceQuery(source, target, k, n_max))
        if args.format == "csv":
            w = report.witness
            text = "seed,k,n_max,witness\n" + f",{k},{n_max},{'' if w is None else w}\n"
        else:
            text = _json_text({"subcommand": "recur", **report.to_json_dict()})
        _emit(text, args.out)
        return 0
    seeds = _seed_list(args)
    if seeds is None:
        raise ValueError("recur needs --seed, --seeds-file, --bits or --bits-file")
    summary = batch_statistics(seeds, target, k, n_max)
    if args.format == "csv":
        text = "\n".join(summary.to_csv_rows()) + "\n"
    else:
        text = _json_text({"subcommand": "recur", **summary.to_json_dict()})
    _emit(text, args.out)
    return 0


def _cmd_kurtz(args) -> int:
    target = _resolve_target(args)
    if not isinstance(target, ClopenSet):
        raise ValueError("the kurtz subcommand needs a clopen target")
    k = args.k if args.k is not None else 1
    t_count = args.t_max if args.t_max is not None else 2
    certs = [kurtz_stage_set(target, k, t) for t in range(t_count)]
    payload = {
        "subcommand": "kurtz",
        "parameters": {"k": k, "stages": t_count, "granularity": target.granularity},
        "certificates": [c.to_json_dict() for c in certs],
        "all_pass": all(c.passes for c in certs),
    }
    source = _single_source(args)
    if source is not None:
        captured, escape = kurtz_capture(source, target, k, t_count - 1)
        payload["capture"] = {"captured": captured, "escape_stage": escape}
    text = _cert_csv(certs) if args.format == "csv" else _json_text(payload)
    _emit(text, args.out)
    return 0


def _cmd_schnorr(args) -> int:
    from .schnorr import schnorr_error_set, schnorr_schedule, schnorr_union_bound

    coenum = _resolve_coenum(args)
    k = args.k if args.k is not None else 1
    v = args.v if args.v is not None else 0
    t_max = args.t_max if args.t_max is not None else 3
    schedule = schnorr_schedule(coenum, k, v, t_max)
    certs = [schnorr_error_set(coenum, schedule, k, v, t) for t in range(1, t_max + 1)]
    union = schnorr_union_bound(certs)
    payload = {
        "subcommand": "schnorr",
        "parameters": {"k": k, "v": v, "t_max": t_max},
        "schedule": list(schedule.times),
        "certificates": [c.to_json_dict() for c in certs],
        "union_measure": str(union),
        "level_bound": str(Dyadic(1, v)),
        "all_pass": all(c.passes for c in certs),
    }
    text = _cert_csv(certs) if args.format == "csv" else _json_text(payload)
    _emit(text, args.out)
    return 0


def _cmd_mltest(args) -> int:
    coenum = _resolve_coenum(args)
    k = args.k if args.k is not None else 1
    stage_max = args.stage_max if args.stage_max is not None else 12
    r_max = args.r if args.r is not None else 3
    result = ml_run(coenum, k, stage_max, r_max, m_max=args.m_max, u_max=args.u_max)
    payload = {
        "subcommand": "mltest",
        "parameters": {"k": k, "stage_max": stage_max, "r_max": r_max},
        "path": result.path,
        "q": str(result.q),
        "certificates": [c.to_json_dict() for c in result.level_certs],
        "all_pass": all(c.passes for c in result.all_certificates()),
    }
    if result.path == "split":
        payload["split"] = {
            "head": [str(w) for w in sorted(result.head, key=lambda w: (w.length, w.value))],
            "head_max_len": result.head_max_len,
            "tail_q": str(result.tail_q),
        }
        payload["g_certificates"] = [c.to_json_dict() for c in result.g_certs]
        payload["refined_certificates"] = [c.to_json_dict() for c in result.refined_certs]
        if result.refinement is not None:
            payload["refinement"] = [
                {"j": lv.j, "u": lv.u, "bound": str(lv.bound)} for lv in result.refinement
            ]
        source = _single_source(args)
        if source is not None:
            prefix = source.prefix(stage_max)
            payload["escape_level"] = ml_escape_level(prefix, result.g_certs)
    text = (
        _cert_csv(result.all_certificates())
        if args.format == "csv"
        else _json_text(payload)
    )
    _emit(text, args.out)
    return 0


def _cmd_grid(args) -> int:
    dim = args.dimension if args.dimension is not None else 2
    if args.op == "witness":
        if not args.target_bits:
            raise ValueError("grid witness needs --target-bits")
        n1 = args.n1 if args.n1 is not None else 1
        target = ArrayClopenSet.from_bit_strings(dim, n1, args.target_bits.split(","))
        seed = args.seed[0] if args.seed else 0
        grid = SeededGridSource(seed, dim)
        n = grid_find_witness(grid, target, args.n_max if args.n_max is not None else 64)
        _emit(
            _json_text(
                {"subcommand": "grid", "op": "witness", "seed": seed, "witness": n}
            ),
            args.out,
        )
        return 0
    if args.op == "kurtz":
        if not args.target_bits:
            raise ValueError("grid kurtz needs --target-bits")
        n1 = args.n1 if args.n1 is not None else 1
        target = ArrayClopenSet.from_bit_strings(dim, n1, args.target_bits.split(","))
        r = args.r if args.r is not None else 1
        certs = [grid_kurtz_stage_set(target, stage) for stage in range(1, r + 1)]
        payload = {
            "subcommand": "grid",
            "op": "kurtz",
            "certificates": [c.to_json_dict() for c in certs],
            "all_pass": all(c.passes for c in certs),
        }
        text = _cert_csv(certs) if args.format == "csv" else _json_text(payload)
        _emit(text, args.out)
        return 0
    if args.op == "ml":
        if not args.class_file:
            raise ValueError("grid ml needs --class-file with an array co-enumeration")
        coenum = _load_class_file(args.class_file)
        if not isinstance(coenum, ArrayStagedCoEnumeration):
            raise ValueError("grid ml needs an array co-enumeration class file")
        stage_max = args.stage_max if args.stage_max is not None else 5
        r_max = args.r if args.r is not None else 1
        certs = [grid_ml_enumerate_C(coenum, r, stage_max) for r in range(r_max + 1)]
        payload = {
            "subcommand": "grid",
            "op": "ml",
            "certificates": [c.to_json_dict() for c in certs],
            "all_pass": all(c.passes for c in certs),
        }
        text = _cert_csv(certs) if args.format == "csv" else _json_text(payload)
        _emit(text, args.out)
        return 0
    raise ValueError(f"unknown grid op {args.op!r}")


def _cmd_rotate(args) -> int:
    alpha = args.alpha if args.alpha is not None else "golden"
    k = args.k if args.k is not None else 1
    epsilon = Fraction(args.epsilon if args.epsilon is not None else "1/20")
    precision = args.precision if args.precision is not None else default_precision()
    system = RotationSystem(alpha, precision)
    ceiling = dirichlet_ceiling(k, epsilon)
    n_max = args.n_max if args.n_max is not None else ceiling
    scan = find_multi_return(system, k, epsilon, n_max)
    cf = cf_accelerated_return(system, k, epsilon)
    payload = {
        "subcommand": "rotate",
        "alpha": system.describe(),
        "k": k,
        "epsilon": f"{epsilon.numerator}/{epsilon.denominator}",
        "ceiling": ceiling,
        "scan": None if scan is None else scan.to_json_dict(),
        "cf": cf.to_json_dict(),
        "scan_verified": None if scan is None else verify_return(system, scan),
    }
    if args.format == "csv":
        rows = ["alpha,k,epsilon,method,n,max_distance"]
        eps = f"{epsilon.numerator}/{epsilon.denominator}"
        if scan is not None:
            rows.append(
                f"{system.describe()},{k},{eps},scan,{scan.n},{float(scan.max_distance())!r}"
            )
        rows.append(
            f"{system.describe()},{k},{eps},cf,{cf.n},{float(cf.max_distance())!r}"
        )
        text = "\n".join(rows) + "\n"
    else:
        text = _json_text(payload)
    _emit(text, args.out)
    return 0


def _cmd_verify(args) -> int:
    with open(args.certificate, "r", encoding="utf-8") as fh:
        certs = certificates_from_json(fh.read())
    lines = []
    bad = False
    for idx, cert in enumerate(certs):
        problems = verify_certificate(cert)
        if problems:
            bad = True
            lines.append(f"certificate {idx} ({cert.kind}): " + "; ".join(problems))
        else:
            lines.append(f"certificate {idx} ({cert.kind}): ok")
    _emit("\n".join(lines) + "\n", args.out)
    return 1 if bad else 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=None)
    parser.add_argument("--r", type=int, default=None)
    parser.add_argument("--v", type=int, default=None)
    parser.add_argument("--t-max", dest="t_max", type=int, default=None)
    parser.add_argument("--n-max", dest="n_max", type=int, default=None)
    parser.add_argument("--stage-max", dest="stage_max", type=int, default=None)
    parser.add_argument("--m-max", dest="m_max", type=int, default=None)
    parser.add_argument("--u-max", dest="u_max", type=int, default=None)
    parser.add_argument("--epsilon", type=str, default=None)
    parser.add_argument("--alpha", type=str, default=None)
    parser.add_argument("--precision", type=int, default=None)
    parser.add_argument("--seed", type=int, action="append", default=None)
    parser.add_argument("--seeds-file", dest="seeds_file", type=str, default=None)
    parser.add_argument("--bits", type=str, default=None)
    parser.add_argument("--bits-file", dest="bits_file", type=str, default=None)
    parser.add_argument("--class-file", dest="class_file", type=str, default=None)
    parser.add_argument("--clopen", type=str, default=None)
    parser.add_argument("--target-bits", dest="target_bits", type=str, default=None)
    parser.add_argument("--n1", type=int, default=None)
    parser.add_argument("--dimension", type=int, default=None)
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    parser.add_argument("--out", type=str, default=None)
    parser.add_argument("--config", type=str, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftrec",
        description="Recurrence witnesses, exact cylinder measures, and "
        "randomness-test certificates on shift spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name)
        if name == "verify":
            p.add_argument("certificate", type=str)
            p.add_argument("--out", type=str, default=None)
            p.add_argument("--config", type=str, default=None)
        else:
            _add_common(p)
            if name == "grid":
                p.add_argument("--op", choices=("witness", "kurtz", "ml"), default="witness")
        p.set_defaults(func=fn)
    return parser


def _apply_config(args: argparse.Namespace) -> None:
    if getattr(args, "config", None) is None:
        return
    with open(args.config, "r", encoding="utf-8") as fh:
        conf = json.load(fh)
    for key, value in conf.items():
        dest = key.replace("-", "_")
        if getattr(args, dest, None) is None:
            setattr(args, dest, value)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        if getattr(args, "format", None) is None:
            args.format = "json"
        return args.func(args)
    except BoundViolationError as exc:
        print(f"bound violated: {exc}", file=sys.stderr)
        return 1
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


_COMMANDS = {
    "recur": _cmd_recur,
    "kurtz": _cmd_kurtz,
    "schnorr": _cmd_schnorr,
    "mltest": _cmd_mltest,
    "grid": _cmd_grid,
    "rotate": _cmd_rotate,
    "verify": _cmd_verify,
}


if __name__ == "__main__":
    sys.exit(main())
