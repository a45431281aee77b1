"""Command line front end.

Subcommands::

    msglen fit    MODEL [CSV]  fit a model family to CSV data
    msglen eval   MODEL [CSV]  per-datum and total cost of data under a model
    msglen sample MODEL N      draw N rows from a parameterised model
    msglen check  SUITE        run one of the built-in invariance suites

MODEL is an expression such as ``normal``, ``uniform:0:3``,
``multistate:0:1``, ``rd:normal^2``, optionally parameterised
(``normal(0,1)``) and transformed (``normal.transform(log)``).  CSV is a
path or ``-`` for stdin; a header row is required.

Exit codes: 0 success, 1 usage or parse error, 2 data or domain error,
3 a check suite failed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import functions as fn
from . import models
from .checks import SUITES
from .errors import ModelExprError, MsglenError
from .estimation import LN_2
from .models import DEFAULT_SAMPLE_AOM, Model, UPModel
from .values import ColumnSpec, dataset_from_csv

USAGE_ERROR = 1
DATA_ERROR = 2
CHECK_FAILED = 3


# ---------------------------------------------------------------------------
# Model expressions
# ---------------------------------------------------------------------------


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, literal: str) -> bool:
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str) -> None:
        if not self.take(literal):
            raise ModelExprError(f"expected {literal!r}", pos=self.pos)

    def ident(self) -> str:
        start = self.pos
        while (c := self.peek()) and (c.isalnum() or c == "_"):
            self.pos += 1
        if self.pos == start:
            raise ModelExprError("expected a name", pos=start)
        return self.text[start:self.pos]

    def integer(self) -> int:
        start = self.pos
        if self.peek() in ("+", "-"):
            self.pos += 1
        while self.peek().isdigit():
            self.pos += 1
        try:
            return int(self.text[start:self.pos])
        except ValueError:
            raise ModelExprError("expected an integer", pos=start) from None

    def number(self) -> float:
        start = self.pos
        if self.peek() in ("+", "-"):
            self.pos += 1
        while (c := self.peek()) and (c.isdigit() or c in ".eE"):
            if c in "eE" and self.text[self.pos + 1 : self.pos + 2] in ("+", "-"):
                self.pos += 1
            self.pos += 1
        try:
            return float(self.text[start:self.pos])
        except ValueError:
            raise ModelExprError("expected a number", pos=start) from None

    def number_list(self, sep: str = ",") -> list[float]:
        out = [self.number()]
        while self.take(sep):
            out.append(self.number())
        return out


def _parse_base(sc: _Scanner) -> UPModel:
    name = sc.ident()
    if name == "normal":
        return models.normal
    if name in ("uniform", "multistate"):
        sc.expect(":")
        lo = sc.integer()
        sc.expect(":")
        hi = sc.integer()
        if lo > hi:
            raise ModelExprError(f"empty space [{lo}, {hi}]", pos=sc.pos)
        return models.bounded_uniform(lo, hi) if name == "uniform" else models.multistate(lo, hi)
    if name == "rd":
        sc.expect(":")
        inner = sc.ident()
        if inner != "normal":
            raise ModelExprError(f"unknown component family {inner!r}", pos=sc.pos)
        sc.expect("^")
        dim = sc.integer()
        if dim < 1:
            raise ModelExprError("dimension must be at least 1", pos=sc.pos)
        return models.independent_rd([models.normal] * dim)
    raise ModelExprError(f"unknown model family {name!r}", pos=sc.pos)


def _parse_params(sc: _Scanner, family: UPModel):
    """The parenthesised statistical parameters, shaped for the family."""
    if isinstance(family, models.IndependentProductFamily):
        groups = [tuple(sc.number_list())]
        while sc.take(";"):
            groups.append(tuple(sc.number_list()))
        if len(groups) != family.dim:
            raise ModelExprError(
                f"{family.name} needs {family.dim} groups 'mean,sd' separated by ';'",
                pos=sc.pos,
            )
        return tuple(groups)
    if isinstance(family, models.BoundedUniformFamily):
        return ()
    return tuple(sc.number_list())


def _parse_function(sc: _Scanner, family: UPModel):
    name = sc.ident()
    args: list[float] = []
    if sc.take("("):
        if not sc.take(")"):
            args = sc.number_list()
            sc.expect(")")
    if isinstance(family, models.ContinuousFamily):
        return _cts_function(name, args, sc.pos)
    if isinstance(family, models.VectorFamily):
        return _vector_function(name, args, family.dim, sc.pos)
    if isinstance(family, models.DiscreteFamily):
        return _discrete_function(name, args, family.lo, family.hi, sc.pos)
    raise ModelExprError(f"cannot transform {family.name}", pos=sc.pos)


def _cts_function(name: str, args: list[float], pos: int) -> fn.Cts2Cts:
    if name in fn.CTS_LIBRARY:
        if args:
            raise ModelExprError(f"{name} takes no arguments", pos=pos)
        return fn.CTS_LIBRARY[name]
    if name == "linear":
        if len(args) != 2:
            raise ModelExprError("linear takes (a,b)", pos=pos)
        return fn.linear(args[0], args[1])
    raise ModelExprError(f"unknown continuous function {name!r}", pos=pos)


def _vector_function(name: str, args: list[float], dim: int, pos: int) -> fn.CtsD2CtsD:
    if name in ("polar2cartesian", "cartesian2polar"):
        if dim != 2:
            raise ModelExprError(f"{name} needs a 2-dimensional model", pos=pos)
        return fn.polar2cartesian if name == "polar2cartesian" else fn.cartesian2polar
    if name == "permute":
        if sorted(int(a) for a in args) != list(range(dim)):
            raise ModelExprError(f"permute needs a permutation of 0..{dim - 1}", pos=pos)
        return fn.ComponentPermutation([int(a) for a in args])
    raise ModelExprError(f"unknown vector function {name!r}", pos=pos)


def _discrete_function(
    name: str, args: list[float], lo: int, hi: int, pos: int
) -> fn.DiscreteBijection:
    if name == "reverse":
        if args:
            raise ModelExprError("reverse takes no arguments", pos=pos)
        return fn.ReversePermutation(lo, hi)
    if name == "rotate":
        if len(args) != 1:
            raise ModelExprError("rotate takes (k)", pos=pos)
        return fn.Rotation(lo, hi, int(args[0]))
    raise ModelExprError(f"unknown discrete function {name!r}", pos=pos)


def parse_model_expr(text: str) -> UPModel | Model:
    """Parse a model expression to a family or, with parameters, a model."""
    sc = _Scanner(text.strip())
    family = _parse_base(sc)
    sp = None
    if sc.take("("):
        sp = _parse_params(sc, family)
        sc.expect(")")
    while sc.take(".transform("):
        f = _parse_function(sc, family)
        sc.expect(")")
        try:
            family = family.transform(f)
        except MsglenError as e:
            raise ModelExprError(str(e), pos=sc.pos) from e
    if sc.pos != len(sc.text):
        raise ModelExprError(f"unexpected trailing {sc.text[sc.pos:]!r}", pos=sc.pos)
    if sp is None:
        return family
    return family.parameterise(sp)


def _require_model(target: UPModel | Model) -> Model:
    """A parameterised model; families with trivial parameters qualify."""
    if isinstance(target, Model):
        return target
    try:
        return target.parameterise(())
    except MsglenError:
        raise ModelExprError(
            f"{target.name} needs explicit parameters, e.g. normal(0,1)"
        ) from None


# ---------------------------------------------------------------------------
# CSV schema from flags
# ---------------------------------------------------------------------------


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return handle.read()


def _header(text: str) -> list[str]:
    first = text.splitlines()[0] if text.splitlines() else ""
    return [h.strip() for h in first.split(",")] if first else []


def _build_schema(args, target: UPModel | Model, text: str) -> list[ColumnSpec]:
    if isinstance(target, (models.DiscreteFamily, models.DiscreteModel)):
        kind, ncols = "discrete", 1
    elif isinstance(target, (models.VectorFamily, models.VectorModel)):
        kind, ncols = "cts", target.dim
    else:
        kind, ncols = "cts", 1

    aom_cols = list(args.aom_col or [])
    if args.col:
        names = list(args.col)
    else:
        names = [h for h in _header(text) if h not in aom_cols][:ncols]
    if len(names) != ncols:
        raise ModelExprError(
            f"{getattr(target, 'name', target)} needs {ncols} data column(s); "
            f"select them with --col"
        )
    if aom_cols and len(aom_cols) != ncols:
        raise ModelExprError(f"--aom-col must be given once per data column ({ncols})")

    specs = []
    for j, name in enumerate(names):
        if kind == "discrete":
            lo = getattr(target, "lo", None)
            hi = getattr(target, "hi", None)
            specs.append(ColumnSpec(name, kind="discrete", lo=lo, hi=hi))
        else:
            specs.append(
                ColumnSpec(
                    name,
                    kind="cts",
                    aom_col=aom_cols[j] if aom_cols else None,
                    aom_const=args.aom_const,
                )
            )
    return specs


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _emit(pairs: list[tuple[str, object]], fmt: str) -> None:
    for key, value in pairs:
        if fmt == "kv":
            print(f"{key}={value!r}" if isinstance(value, float) else f"{key}={value}")
        else:
            text = f"{value:.12g}" if isinstance(value, float) else str(value)
            print(f"{key}: {text}")


def cmd_fit(args) -> int:
    target = parse_model_expr(args.model)
    if isinstance(target, Model):
        raise ModelExprError("fit takes an unparameterised model; drop the parameters")
    text = _read_source(args.csv)
    ds = dataset_from_csv(text, _build_schema(args, target, text))
    result = target.estimator().estimate(ds)
    if args.format == "kv":
        _emit(list(result.kv(bits=args.bits).items()), "kv")
    else:
        print(result.text(bits=args.bits))
    return 0


def cmd_eval(args) -> int:
    target = _require_model(parse_model_expr(args.model))
    text = _read_source(args.csv)
    ds = dataset_from_csv(text, _build_schema(args, target, text))
    scale = 1.0 / LN_2 if args.bits else 1.0
    pairs: list[tuple[str, object]] = []
    total = 0.0
    for i, d in enumerate(ds):
        nl = target.nl_pr(d)
        total += nl
        pairs.append((f"nlpr.{i}", nl * scale))
    pairs += [
        ("count", len(ds)),
        ("total", total * scale),
        ("units", "bits" if args.bits else "nits"),
    ]
    _emit(pairs, args.format)
    return 0


def _sample_header(model: Model) -> list[str]:
    if isinstance(model, models.VectorModel):
        d = model.dim
        return [f"x{j + 1}" for j in range(d)] + [f"aom{j + 1}" for j in range(d)]
    if isinstance(model, models.DiscreteModel):
        return ["x"]
    return ["x", "aom"]


def cmd_sample(args) -> int:
    target = _require_model(parse_model_expr(args.model))
    if args.count < 0:
        raise ModelExprError("count must be non-negative")
    rng = np.random.default_rng(args.seed)
    print(",".join(_sample_header(target)))
    for _ in range(args.count):
        d = target.random(rng, aom=args.sample_aom)
        if isinstance(target, models.VectorModel):
            cells = [repr(c) for c in d.components] + [repr(a) for a in d.aoms]
        elif isinstance(target, models.DiscreteModel):
            cells = [str(d.value)]
        else:
            cells = [repr(d.x), repr(d.aom)]
        print(",".join(cells))
    return 0


def cmd_check(args) -> int:
    results = SUITES[args.suite]()
    failed = 0
    for r in results:
        mark = "ok  " if r.passed else "FAIL"
        print(f"{mark} {r.name}: {r.detail}")
        failed += 0 if r.passed else 1
    print(f"{args.suite}: {len(results) - failed}/{len(results)} passed")
    return 0 if failed == 0 else CHECK_FAILED


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="msglen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_data_flags(p):
        p.add_argument("csv", nargs="?", default="-", help="CSV path, or - for stdin")
        p.add_argument("--col", action="append", help="data column name (repeatable)")
        p.add_argument("--aom-col", action="append", help="AoM column name (repeatable)")
        p.add_argument("--aom-const", type=float, help="constant AoM for all data columns")
        p.add_argument("--bits", action="store_true", help="report in bits, not nits")
        p.add_argument("--format", choices=("text", "kv"), default="text")

    p_fit = sub.add_parser("fit", help="fit a model family to CSV data")
    p_fit.add_argument("model", help='e.g. "normal.transform(log)"')
    add_data_flags(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_eval = sub.add_parser("eval", help="score data under a parameterised model")
    p_eval.add_argument("model", help='e.g. "normal(0,1)"')
    add_data_flags(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_sample = sub.add_parser("sample", help="draw rows from a parameterised model")
    p_sample.add_argument("model", help='e.g. "normal(0,1).transform(log)"')
    p_sample.add_argument("count", type=int, help="number of rows")
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument(
        "--sample-aom",
        type=float,
        default=DEFAULT_SAMPLE_AOM,
        help="AoM attached to continuous draws",
    )
    p_sample.set_defaults(func=cmd_sample)

    p_check = sub.add_parser("check", help="run an invariance suite")
    p_check.add_argument("suite", choices=sorted(SUITES))
    p_check.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    try:
        return args.func(args)
    except ModelExprError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except MsglenError as e:
        print(f"error: {e}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
