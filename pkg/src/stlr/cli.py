"""Command-line driver.

Exit codes: 0 success or pass, 1 failure or counterexample, 2 usage or input
error, 3 internal error.  JSON output always carries ``"schema": 1``.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .corpus import bundled_corpus, corpus_run
from .diffspace import diff_eval
from .dlr import DEFAULT_TRIALS, dlr_check, finite_check, metric_check, null_check, weakly_bounded
from .errors import GmdError, InternalError, ParseError, StlrError
from .evaluation import DEFAULT_FUEL, eval_term
from .gmd import check_arrow, check_gmd, check_quantale, law_suite, load_instances
from .prims import Registry, default_registry, load_registry
from .sampling import Sampler
from .sensitivity import derive_self_distance
from .syntax.parser import parse_diff, parse_term, parse_type
from .syntax import ast as A
from .syntax.printer import format_real, print_diff, print_term, print_type
from .typecheck import check_against, type_of_closed
from .verdict import SCHEMA, dumps

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(StlrError):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    trials: int = DEFAULT_TRIALS
    fuel: int = DEFAULT_FUEL
    generator_depth: int = 2
    real_range: tuple[float, float] = (-10.0, 10.0)
    prim_registry_path: str | None = None
    output_format: str = "json"

    def __post_init__(self):
        if self.trials < 1:
            raise UsageError("--trials must be at least 1")
        if self.fuel < 1:
            raise UsageError("--fuel must be at least 1")
        if self.generator_depth < 0:
            raise UsageError("--depth must be nonnegative")
        lo, hi = self.real_range
        if not lo < hi:
            raise UsageError("--real-range needs LO < HI")
        if self.output_format not in ("json", "text"):
            raise UsageError("--format must be json or text")

    def sampler(self) -> Sampler:
        return Sampler(seed=self.seed, real_range=self.real_range, depth=self.generator_depth)

    def registry(self) -> Registry:
        path = self.prim_registry_path or os.environ.get("STLR_PRIMS")
        return load_registry(path) if path else default_registry()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    g.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    g.add_argument("--depth", type=int, default=2, help="nesting depth for higher-order premises")
    g.add_argument("--real-range", type=float, nargs=2, metavar=("LO", "HI"), default=(-10.0, 10.0))
    g.add_argument("--prims", metavar="PATH", help="primitive registry (overrides STLR_PRIMS)")
    g.add_argument("--format", choices=("json", "text"), default="json")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="stlr", description="Differential logical relations for a typed lambda calculus over the reals.")
    parser.add_argument("--version", action="version", version=f"stlr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[common], help="typecheck a closed term")
    p.add_argument("file")
    p.add_argument("--type", dest="ty")

    p = sub.add_parser("eval", parents=[common], help="evaluate a closed term")
    p.add_argument("file")

    p = sub.add_parser("dlr-check", parents=[common], help="check (lhs, diff, rhs) at a type")
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    p.add_argument("--diff", required=True)
    p.add_argument("--type", dest="ty", required=True)

    p = sub.add_parser("member", parents=[common], help="membership in the null, metric or finite set")
    p.add_argument("--set", dest="set_name", required=True, metavar="{null|metric:R|finite}")
    p.add_argument("--diff", required=True)
    p.add_argument("--type", dest="ty", required=True)

    p = sub.add_parser("derive", parents=[common], help="derive a self-distance for a closed term")
    p.add_argument("file")
    p.add_argument("--type", dest="ty")
    p.add_argument("--at", metavar='"(POINT, RADIUS)"', help="evaluate the derived distance of a Real -> Real term")

    p = sub.add_parser("gmd-laws", parents=[common], help="check laws on finite metric domains")
    p.add_argument("--spec", required=True)
    p.add_argument("--no-exponentials", action="store_true")

    p = sub.add_parser("corpus", parents=[common], help="run a fixture corpus")
    p.add_argument("dir", nargs="?", help="corpus directory (default: the bundled one)")
    return parser


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UsageError(f"{path}: file not found") from None
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None


def _located(path: str, fn, *args, **kwargs):
    """Run a parser, prefixing any parse error with the file name."""
    try:
        return fn(*args, **kwargs)
    except ParseError as exc:
        where = f"{path}:{exc.line}:{exc.col}" if exc.line else path
        raise UsageError(f"{where}: {exc.message}") from None


class _Out:
    def __init__(self, fmt: str, stream):
        self.fmt = fmt
        self.stream = stream

    def emit(self, obj: dict, text: str) -> None:
        if self.fmt == "json":
            print(dumps({"schema": SCHEMA, **obj}), file=self.stream)
        else:
            print(text, file=self.stream)


def _verdict_text(v) -> str:
    out = v.status
    if not v.exact:
        out += f" ({v.trials} trials, seed {v.seed})"
    if v.witness:
        out += "\nwitness: " + dumps(v.witness)
    return out


def _cmd_check(args, cfg: RunConfig, out: _Out) -> int:
    reg = cfg.registry()
    t = _located(args.file, parse_term, _read(args.file), registry=reg)
    try:
        if args.ty:
            ty = parse_type(args.ty)
            check_against({}, t, ty, registry=reg)
        else:
            ty = type_of_closed(t, registry=reg)
    except StlrError as exc:
        out.emit({"status": "ill_typed", "error": str(exc)}, f"ill-typed: {exc}")
        return EXIT_FAIL
    out.emit({"status": "well_typed", "type": print_type(ty)}, print_type(ty))
    return EXIT_OK


def _cmd_eval(args, cfg: RunConfig, out: _Out) -> int:
    reg = cfg.registry()
    t = _located(args.file, parse_term, _read(args.file), registry=reg)
    type_of_closed(t, registry=reg)
    rep = eval_term(t, cfg.fuel, registry=reg)
    value = print_term(rep.value)
    out.emit({"value": value, "steps": rep.steps}, f"{value}\n({rep.steps} steps)")
    return EXIT_OK


def _cmd_dlr(args, cfg: RunConfig, out: _Out) -> int:
    reg = cfg.registry()
    ty = parse_type(args.ty)
    lhs = _located(args.lhs, parse_term, _read(args.lhs), registry=reg)
    rhs = _located(args.rhs, parse_term, _read(args.rhs), registry=reg)
    d = _located(args.diff, parse_diff, _read(args.diff), ty, registry=reg)
    v = dlr_check(lhs, d, rhs, ty, cfg.sampler(), cfg.trials, registry=reg, fuel=cfg.fuel)
    out.emit(v.to_json(), _verdict_text(v))
    return EXIT_OK if v.passed else EXIT_FAIL


def _cmd_member(args, cfg: RunConfig, out: _Out) -> int:
    reg = cfg.registry()
    ty = parse_type(args.ty)
    d = _located(args.diff, parse_diff, _read(args.diff), ty, registry=reg)
    name = args.set_name
    s = cfg.sampler()
    if name == "null":
        v = null_check(d, ty, s, cfg.trials, registry=reg)
    elif name == "finite":
        v = finite_check(d, ty, s, cfg.trials, registry=reg)
    elif name.startswith("metric:"):
        try:
            r = float(name.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad metric parameter in {name!r}") from None
        v = metric_check(d, ty, r, s, cfg.trials, registry=reg)
    else:
        raise UsageError(f"unknown set {name!r}; use null, metric:R or finite")
    out.emit(v.to_json(), _verdict_text(v))
    return EXIT_OK if v.passed else EXIT_FAIL


def _cmd_derive(args, cfg: RunConfig, out: _Out) -> int:
    reg = cfg.registry()
    t = _located(args.file, parse_term, _read(args.file), registry=reg)
    ty = parse_type(args.ty) if args.ty else type_of_closed(t, registry=reg)
    check_against({}, t, ty, registry=reg)
    dd = derive_self_distance({}, t, ty, registry=reg)
    text = print_diff(dd.expr)
    obj = {
        "diff": text,
        "type": print_type(dd.type),
        "trace": [list(step) for step in dd.trace],
        "uses_extensions": dd.uses_extensions,
        "weakly_bounded": weakly_bounded(t, registry=reg),
    }
    if args.at is not None:
        if ty != A.Arrow(A.Real, A.Real):
            raise UsageError("--at needs a term of type Real -> Real")
        point, radius = _pair_of_reals(args.at)
        value = diff_eval(dd.expr, registry=reg)(point, radius)
        obj["at"] = [point, radius]
        obj["value"] = value
        text += f"\nat ({format_real(point)}, {format_real(radius)}): {format_real(value)}"
    out.emit(obj, text)
    return EXIT_OK


def _pair_of_reals(text: str) -> tuple[float, float]:
    parts = text.strip().removeprefix("(").removesuffix(")").split(",")
    try:
        point, radius = (float(x) for x in parts)
    except ValueError:
        raise UsageError(f"--at expects \"(POINT, RADIUS)\", got {text!r}") from None
    if not radius >= 0:
        raise UsageError("--at radius must be nonnegative")
    return point, radius


def _cmd_gmd(args, cfg: RunConfig, out: _Out) -> int:
    try:
        doc = tomllib.loads(_read(args.spec))
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"{args.spec}: {exc}") from None
    quantales, objects, arrows = load_instances(doc)
    reports = [check_quantale(q) for q in quantales.values()]
    reports += [check_gmd(o) for o in objects.values()]
    reports += [check_arrow(a) for a in arrows.values()]
    suite = law_suite(list(objects.values()), list(arrows.values()), exponentials=not args.no_exponentials)
    passed = all(r.passed for r in reports) and suite.passed
    lines = [f"{'ok  ' if r.passed else 'FAIL'} {r.subject}" for r in reports]
    lines += [f"{'ok  ' if r.passed else 'FAIL'} {r.name} ({r.checked} checked)" for r in suite.results]
    out.emit({
        "passed": passed,
        "reports": [r.to_json() for r in reports],
        "suite": suite.to_json(),
    }, "\n".join(lines))
    return EXIT_OK if passed else EXIT_FAIL


def _cmd_corpus(args, cfg: RunConfig, out: _Out) -> int:
    directory = args.dir or bundled_corpus()
    rep = corpus_run(directory, cfg.sampler(), cfg.trials, registry=cfg.registry(), fuel=cfg.fuel)
    js = rep.to_json()
    js.pop("schema")
    lines = [
        f"{'ok  ' if r.matched else 'FAIL'} {r.fixture.name}: {r.status} (expected {r.fixture.expect})"
        + (f" {r.error}" if r.error else "")
        for r in rep.results
    ]
    lines.append(f"{js['matched']}/{js['total']} fixtures matched")
    out.emit(js, "\n".join(lines))
    return EXIT_OK if rep.passed else EXIT_FAIL


_COMMANDS = {
    "check": _cmd_check,
    "eval": _cmd_eval,
    "dlr-check": _cmd_dlr,
    "member": _cmd_member,
    "derive": _cmd_derive,
    "gmd-laws": _cmd_gmd,
    "corpus": _cmd_corpus,
}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig(
            seed=args.seed, trials=args.trials, fuel=args.fuel, generator_depth=args.depth,
            real_range=tuple(args.real_range), prim_registry_path=args.prims,
            output_format=args.format,
        )
        return _COMMANDS[args.command](args, cfg, _Out(cfg.output_format, stdout))
    except (StlrError, GmdError) as exc:
        print(f"stlr: error: {exc}", file=stderr)
        return EXIT_USAGE
    except InternalError as exc:
        print(f"stlr: internal error: {exc}", file=stderr)
        return EXIT_INTERNAL
    except RecursionError:
        print("stlr: internal error: recursion limit exceeded", file=stderr)
        return EXIT_INTERNAL


def main(argv: list[str] | None = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
