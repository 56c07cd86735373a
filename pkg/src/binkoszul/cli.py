"""Command-line front end.

Subcommands: gen (curve file), assemble (SMS matrix), rank, verify and
selftest.  Exit codes: 0 success, 1 property failure, 2 bad configuration,
3 domain validation (field too small, not a prime), 4 I/O or parse
errors, 5 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from . import __version__
from .curve import (CANONICAL, MODELS, PRYM, InvalidGenus, admissible_nodes, curve_digest,
                    curve_from_json, curve_to_json, sample_params)
from .errors import (BadDimensions, FieldTooSmall, InvalidNode, InvalidPrime, KoszulError,
                     ModelMismatch, NonConvergence, OutOfRange, ParseError, TooLarge)
from .koszul import FULL, V, W, WCAN, assemble, default_subspace, koszul_sign
from .sparse.multiprime import METHODS, rank_by_method
from .sparse.sms import atomic_write, load_sms, save_sms
from .verify import (NpQuery, diagram_check, dd_zero_check, lemmaW_support_check,
                     multiplication_rank_check, node_incidence_check, np_survey, prym_threshold)

log = logging.getLogger("binkoszul")

EXIT_OK, EXIT_PROPERTY, EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO, EXIT_NUMERIC = range(6)
SCHEMA_VERSION = "1.0"
DEFAULT_PRIMES = (131, 65537)
THREADS_ENV = "KOSZUL_THREADS"

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "binkoszul report",
    "type": "object",
    "required": ["schema_version", "tool", "version", "command", "config", "curve_digest",
                 "dims", "rank", "kernel_dim", "verdict", "breakdown", "elapsed_ms"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "tool": {"const": "binkoszul"},
        "version": {"type": "string"},
        "command": {"enum": ["rank", "verify", "selftest"]},
        "config": {"type": "object"},
        "curve_digest": {"anyOf": [{"type": "null"}, {"type": "string"},
                                   {"type": "array", "items": {"type": "string"}}]},
        "dims": {"anyOf": [{"type": "null"}, {
            "type": "object",
            "required": ["nrows", "ncols"],
            "properties": {"nrows": {"type": "integer", "minimum": 0},
                           "ncols": {"type": "integer", "minimum": 0},
                           "nnz": {"type": "integer", "minimum": 0}},
        }]},
        "rank": {"type": ["integer", "null"], "minimum": 0},
        "kernel_dim": {"type": ["integer", "null"], "minimum": 0},
        "verdict": {"type": "string"},
        "breakdown": {"type": "array", "items": {"type": "object"}},
        "elapsed_ms": {"type": "number", "minimum": 0},
    },
    "additionalProperties": False,
}


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, CliError):
        return exc.code
    if isinstance(exc, NonConvergence):
        return EXIT_NUMERIC
    if isinstance(exc, (ParseError, OSError)):
        return EXIT_IO
    if isinstance(exc, (FieldTooSmall, InvalidPrime)):
        return EXIT_DOMAIN
    if isinstance(exc, (InvalidGenus, BadDimensions, ModelMismatch, InvalidNode, OutOfRange,
                        TooLarge)):
        return EXIT_CONFIG
    if isinstance(exc, (KoszulError, ValueError)):
        return EXIT_DOMAIN
    raise exc


# -- argument parsing -------------------------------------------------------

def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def resolve_threads(flag) -> int:
    """Flag wins over the environment; default is the available parallelism."""
    if flag is not None:
        return max(1, flag)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise CliError(f"{THREADS_ENV}={env!r} is not an integer", EXIT_CONFIG)
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def _add_curve_flags(sp, single=True):
    sp.add_argument("--model", choices=MODELS)
    sp.add_argument("--genus", type=int)
    if single:
        sp.add_argument("--prime", type=int, default=131)
        sp.add_argument("--seed", type=int, default=0)


def _add_degree_flags(sp):
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--np", dest="np_index", type=int, help="N_p index p")
    g.add_argument("--ell", type=int, help="exterior degree l of the Koszul map")
    sp.add_argument("--subspace", choices=(FULL, W, V, WCAN))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="binkoszul",
                                 description="Koszul maps of binary curves over prime fields")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    ap.add_argument("-q", "--quiet", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample a curve and write its JSON file")
    _add_curve_flags(g)
    g.add_argument("--out", help="curve file (stdout if omitted)")

    a = sub.add_parser("assemble", help="write the Koszul matrix as SMS plus sidecar")
    _add_curve_flags(a)
    a.add_argument("--curve", help="curve file instead of --model/--genus/--prime/--seed")
    _add_degree_flags(a)
    a.add_argument("--out", required=True, help="SMS path; the sidecar goes to PATH.json")
    a.add_argument("--threads", type=int)

    r = sub.add_parser("rank", help="rank of an SMS matrix")
    r.add_argument("matrix", help="SMS file (prime read from its sidecar)")
    r.add_argument("--prime", type=int, help="prime when there is no sidecar")
    r.add_argument("--method", choices=METHODS, default="auto")
    r.add_argument("--seed", type=int, default=0, help="Wiedemann probe seed")
    r.add_argument("--report")

    v = sub.add_parser("verify", help="sample, assemble and rank in one go")
    _add_curve_flags(v, single=False)
    _add_degree_flags(v)
    v.add_argument("--prime", type=_int_list, default=list(DEFAULT_PRIMES))
    v.add_argument("--seed", type=_int_list, default=[0])
    v.add_argument("--method", choices=METHODS, default="auto")
    v.add_argument("--retries", type=int, default=3)
    v.add_argument("--report")
    v.add_argument("--threads", type=int)

    s = sub.add_parser("selftest", help="small-genus property battery")
    s.add_argument("--genus", type=int, default=7, help="largest genus in the battery")
    s.add_argument("--prime", type=int, default=131)
    s.add_argument("--seed", type=_int_list, default=[0])
    s.add_argument("--report")
    # negative control: corrupts the differential's signs
    s.add_argument("--flip-sign", action="store_true", help=argparse.SUPPRESS)
    return ap


# -- helpers ------------------------------------------------------------------

def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise CliError("missing " + ", ".join("--" + n for n in missing), EXIT_CONFIG)


def _degree(args, model, genus) -> int:
    """Resolve l from --np / --ell, defaulting to the conjecture threshold."""
    if args.ell is not None:
        return args.ell
    if args.np_index is not None:
        p = args.np_index
    elif model == PRYM:
        p = prym_threshold(genus)
    else:
        p = genus - 2 - genus // 2
    return NpQuery(model, genus, p).l


def _report(command, config, started, *, digest=None, dims=None, rank=None, kernel_dim=None,
            verdict="", breakdown=()) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "binkoszul",
        "version": __version__,
        "command": command,
        "config": config,
        "curve_digest": digest,
        "dims": dims,
        "rank": rank,
        "kernel_dim": kernel_dim,
        "verdict": verdict,
        "breakdown": list(breakdown),
        "elapsed_ms": round(1000 * (time.perf_counter() - started), 3),
    }


def _emit(report: dict, path):
    if path:
        atomic_write(path, (json.dumps(report, indent=2, sort_keys=True) + "\n").encode())
        log.info("report written to %s", path)


def _config(args) -> dict:
    skip = {"verbose", "quiet", "flip_sign"}
    return {k: v for k, v in vars(args).items() if k not in skip}


# -- subcommands --------------------------------------------------------------

def cmd_gen(args) -> int:
    _require(args, "model", "genus")
    params = sample_params(args.model, args.genus, args.prime, args.seed)
    text = curve_to_json(params)
    if args.out:
        atomic_write(args.out, text.encode())
        print(curve_digest(params))
    else:
        sys.stdout.write(text)
        print(curve_digest(params), file=sys.stderr)
    return EXIT_OK


def cmd_assemble(args) -> int:
    if args.curve:
        with open(args.curve) as fh:
            try:
                params = curve_from_json(fh.read())
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CliError(f"{args.curve}: not a curve file ({exc})", EXIT_IO)
    else:
        _require(args, "model", "genus")
        params = sample_params(args.model, args.genus, args.prime, args.seed)
    if params.prime is None:
        raise CliError("assembly needs a curve over a prime field", EXIT_CONFIG)
    l = _degree(args, params.model, params.genus)
    sub = args.subspace or default_subspace(params)
    K = assemble(params, l, sub, threads=resolve_threads(args.threads))
    save_sms(K.matrix, args.out)
    print(f"{K.matrix.nrows} {K.matrix.ncols} nnz={K.matrix.nnz} l={l} subspace={sub}")
    return EXIT_OK


def cmd_rank(args) -> int:
    started = time.perf_counter()
    M = load_sms(args.matrix)
    if args.prime is not None:
        if M.prime is not None and args.prime != M.prime:
            raise CliError(f"--prime {args.prime} disagrees with the sidecar prime {M.prime}", EXIT_CONFIG)
        M = load_sms(args.matrix, args.prime)
    if M.prime is None:
        raise CliError("no prime: give --prime or keep the sidecar next to the matrix", EXIT_CONFIG)
    if args.method == "wiedemann":
        from .sparse.wiedemann import rank_wiedemann
        R = rank_wiedemann(M, M.prime, seed=args.seed)
    else:
        R = rank_by_method(M, M.prime, args.method)
    print(f"rank {R.rank} of {R.nrows}x{R.ncols}, kernel_dim {R.kernel_dim} ({R.method}, {R.certificate})")
    rep = _report("rank", _config(args), started,
                  dims={"nrows": M.nrows, "ncols": M.ncols, "nnz": M.nnz}, rank=R.rank,
                  kernel_dim=R.kernel_dim, verdict=f"rank {R.rank}", breakdown=[R.to_dict()])
    _emit(rep, args.report)
    return EXIT_OK


def cmd_verify(args) -> int:
    started = time.perf_counter()
    _require(args, "model", "genus")
    if args.model == PRYM and args.genus < 5:
        raise InvalidGenus(f"the Prym model needs genus >= 5, got {args.genus}")
    if not args.prime or not args.seed:
        raise CliError("need at least one prime and one seed", EXIT_CONFIG)
    l = _degree(args, args.model, args.genus)
    q = NpQuery.from_ell(args.model, args.genus, l, subspace=args.subspace,
                         prime=args.prime[0], seed=args.seed[0], retries=args.retries,
                         method=args.method)
    res = np_survey(q, args.prime, args.seed, workers=resolve_threads(args.threads))
    line = res.verdict_line()
    print(f"{args.model} g={args.genus} p={q.p} l={q.l} {q.subspace}: "
          f"{res.nrows}x{res.ncols}, kernel_dim per run {res.kernel_dims}")
    print(line)
    rep = _report("verify", _config(args), started,
                  digest=[r["digest"] for r in res.runs],
                  dims={"nrows": res.nrows, "ncols": res.ncols}, rank=res.rank,
                  kernel_dim=res.kernel_dim, verdict=line, breakdown=res.runs)
    rep["config"]["p"], rep["config"]["l"] = q.p, q.l
    _emit(rep, args.report)
    return EXIT_OK


def _flipped_sign(I, h):
    return koszul_sign(I, h) if h % 2 else -koszul_sign(I, h)


def selftest_battery(gmax: int, prime: int, seeds, sign=koszul_sign):
    """Yield (item, arguments, passed) for every check in the battery."""
    seed0 = seeds[0]
    for model in (PRYM, CANONICAL):
        lo = 5 if model == PRYM else 3
        for g in range(lo, gmax + 1):
            n_T = g - 1 if model == PRYM else g
            yield "node_incidence", (model, g), node_incidence_check(model, g, prime, seed0)
            yield "multiplication_span", (model, g), multiplication_rank_check(model, g, prime, seed0)
            for l in range(2, n_T + 1):
                yield "dd_zero", (model, g, l), dd_zero_check(model, g, l, prime, seed0, sign=sign)
            if (model == PRYM and g <= 8) or (model == CANONICAL and g <= 6):
                for l in range(1, n_T + 1):
                    yield "kernel_support", (model, g, l), lemmaW_support_check(model, g, l, prime, seed0)
            params = sample_params(model, g, prime, seed0)
            for r in admissible_nodes(params):
                for l in range(2, n_T + 1):
                    for s in seeds:
                        yield "diagram", (model, g, l, r, s), diagram_check(model, g, l, r, prime, s,
                                                                         sign=sign)


def cmd_selftest(args) -> int:
    started = time.perf_counter()
    sign = _flipped_sign if args.flip_sign else koszul_sign
    items, failed = [], 0
    for name, targs, ok in selftest_battery(args.genus, args.prime, args.seed, sign):
        items.append({"item": name, "args": list(targs), "pass": bool(ok)})
        if not ok:
            failed += 1
            print(f"FAIL {name} {targs}")
        else:
            log.debug("pass %s %s", name, targs)
    groups: dict = {}
    for it in items:
        g = groups.setdefault(it["item"], [0, 0])
        g[0] += it["pass"]
        g[1] += 1
    for name, (ok, tot) in groups.items():
        print(f"{'PASS' if ok == tot else 'FAIL'} {name}: {ok}/{tot}")
    verdict = "all properties hold" if not failed else f"{failed} checks failed"
    print(verdict)
    _emit(_report("selftest", _config(args), started, verdict=verdict, breakdown=items), args.report)
    return EXIT_PROPERTY if failed else EXIT_OK


COMMANDS = {"gen": cmd_gen, "assemble": cmd_assemble, "rank": cmd_rank,
            "verify": cmd_verify, "selftest": cmd_selftest}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * args.verbose if not args.quiet else logging.ERROR
    logging.basicConfig(level=max(level, logging.DEBUG), format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except Exception as exc:  # mapped to exit codes
        code = exit_code_for(exc)
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
