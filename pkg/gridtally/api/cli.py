"""
Command Line Interface
Single Responsibility: Parse, validate and dispatch commands
"""
import argparse
import json
import logging
import os
import sys
from typing import List, Literal, Optional

from pydantic import BaseModel, ValidationError, model_validator

from gridtally import __version__
from gridtally.api.dependencies import (
    get_bounds_service,
    get_oracle,
    get_report_formatter,
    get_transfer_service
)
from gridtally.core.config import settings
from gridtally.core.exceptions import GridTallyException, InvalidInputException, ResourceLimitException
from gridtally.services.gluing.gluer import (
    LEFT,
    RIGHT,
    exhaustive_glue_search,
    glue,
    interior_violations,
    make_stripe_witness
)
from gridtally.services.grid.grid_core import (
    GridDims,
    Variant,
    is_valid,
    is_valid_starred,
    local_rule_violations,
    starred_rows
)
from gridtally.services.transfer.automaton import dump
from gridtally.utilities.util import (
    format_cylinder,
    parse_cylinder,
    parse_pattern,
    read_text_file,
    write_output
)

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("count", "bounds", "ratio", "glue", "verify", "selftest", "dump")
SELFTEST_MAX_CELLS = 16


# ==================== RUN CONFIG ====================

class RunConfig(BaseModel):
    """Validated command-line options."""
    subcommand: Literal["count", "bounds", "ratio", "glue", "verify", "selftest", "dump"]
    variant: Optional[Variant] = None
    n: Optional[int] = None
    m: Optional[int] = None
    m_max: Optional[int] = None
    method: Literal["transfer", "brute"] = "transfer"
    starred: bool = False
    tol: float = settings.POWER_TOL
    max_iters: int = settings.POWER_MAX_ITERS
    workers: int = 1
    out: Optional[str] = None
    format: Literal["json", "csv", "text"] = "text"
    pattern: Optional[str] = None
    definition: bool = False
    explain: bool = False
    left: Optional[str] = None
    right: Optional[str] = None
    k: Optional[int] = None
    stripe: bool = False
    height: int = 8
    width: int = 8
    search: bool = False
    verbose: bool = False

    @model_validator(mode="after")
    def check_required(self) -> "RunConfig":
        needs = {
            "count": ("variant", "n", "m"),
            "bounds": ("variant", "m_max"),
            "ratio": ("variant", "m"),
            "glue": ("variant", "k"),
            "verify": ("variant", "pattern"),
            "dump": ("variant", "m"),
            "selftest": (),
        }[self.subcommand]
        missing = [name for name in needs if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.subcommand} needs --{', --'.join(m.replace('_', '-') for m in missing)}")
        for name in ("n", "m", "m_max", "k", "workers", "max_iters", "height", "width"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if self.tol <= 0:
            raise ValueError("--tol must be positive")
        if self.subcommand == "glue" and not self.stripe and (self.left is None or self.right is None):
            raise ValueError("glue needs --left and --right, or --stripe")
        return self


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors are input errors instead of a bare exit."""

    def error(self, message):
        raise InvalidInputException(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gridtally", description="Count dominating sets of grids and bound their growth constants")
    parser.add_argument("--version", action="version", version=f"gridtally {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--workers", type=int, default=None, help="worker processes (default: available cores)")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv", "text"], default="text")
    common.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    count = sub.add_parser("count", parents=[common], help="exact count of valid sets of an n × m grid")
    count.add_argument("--variant", required=True)
    count.add_argument("--n", type=int, required=True)
    count.add_argument("--m", type=int, required=True)
    count.add_argument("--method", choices=["transfer", "brute"], default="transfer")
    count.add_argument("--starred", action="store_true")

    bounds = sub.add_parser("bounds", parents=[common], help="growth-constant bounds for m = 1..m-max")
    bounds.add_argument("--variant", required=True)
    bounds.add_argument("--m-max", dest="m_max", type=int, required=True)
    bounds.add_argument("--tol", type=float, default=settings.POWER_TOL)
    bounds.add_argument("--max-iters", dest="max_iters", type=int, default=settings.POWER_MAX_ITERS)

    ratio = sub.add_parser("ratio", parents=[common], help="lambda_(m+1) / lambda_m")
    ratio.add_argument("--variant", required=True)
    ratio.add_argument("--m", type=int, required=True)
    ratio.add_argument("--starred", action="store_true")
    ratio.add_argument("--tol", type=float, default=settings.POWER_TOL)
    ratio.add_argument("--max-iters", dest="max_iters", type=int, default=settings.POWER_MAX_ITERS)

    glue_cmd = sub.add_parser("glue", parents=[common], help="fill the gap between two cylinder windows")
    glue_cmd.add_argument("--variant", required=True)
    glue_cmd.add_argument("--k", type=int, required=True)
    glue_cmd.add_argument("--left", default=None)
    glue_cmd.add_argument("--right", default=None)
    glue_cmd.add_argument("--stripe", action="store_true", help="use the striped witness windows")
    glue_cmd.add_argument("--height", type=int, default=8)
    glue_cmd.add_argument("--width", type=int, default=8)
    glue_cmd.add_argument("--search", action="store_true", help="exhaustive search instead of the construction")

    verify = sub.add_parser("verify", parents=[common], help="check a pattern file")
    verify.add_argument("--variant", required=True)
    verify.add_argument("--pattern", required=True)
    verify.add_argument("--definition", action="store_true", help="evaluate the definition literally")
    verify.add_argument("--starred", action="store_true")
    verify.add_argument("--explain", action="store_true", help="list cells breaking the local rules")

    sub.add_parser("selftest", parents=[common], help="transfer against brute force on small grids")

    dump_cmd = sub.add_parser("dump", parents=[common], help="list the transitions of a strip automaton")
    dump_cmd.add_argument("--variant", required=True)
    dump_cmd.add_argument("--m", type=int, required=True)
    dump_cmd.add_argument("--starred", action="store_true")
    return parser


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    """
    Parse and validate arguments.

    Raises:
        InvalidInputException: unknown flags, bad values, missing options
    """
    namespace = build_parser().parse_args(argv)
    values = {key: value for key, value in vars(namespace).items() if value is not None}
    if "variant" in values:
        values["variant"] = Variant.parse(values["variant"])
    values.setdefault("workers", settings.WORKERS or os.cpu_count() or 1)
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise InvalidInputException("; ".join(err["msg"] for err in e.errors()))


# ==================== COMMANDS ====================

def _emit(config: RunConfig, text: str):
    write_output(text, config.out)


def _count(config: RunConfig) -> int:
    dims = GridDims(config.n, config.m)
    if config.method == "brute":
        oracle = get_oracle()
        oracle.workers = config.workers
        value = oracle.brute_force_count(config.variant, dims, config.starred)
    else:
        value = get_transfer_service().count_grid(config.variant, dims, config.starred)
    if config.format == "json":
        record = {
            "variant": config.variant.value, "n": config.n, "m": config.m,
            "starred": config.starred, "method": config.method, "count": value
        }
        _emit(config, json.dumps(record, indent=2) + "\n")
    elif config.format == "csv":
        _emit(config, f"variant,n,m,starred,method,count\n{config.variant.value},{config.n},{config.m},"
                      f"{str(config.starred).lower()},{config.method},{value}\n")
    else:
        _emit(config, f"{value}\n")
    return 0


def _bounds(config: RunConfig) -> int:
    service = get_bounds_service()
    service.max_iters = config.max_iters
    reports = service.bounds_report(config.variant, config.m_max, config.tol, config.workers)
    _emit(config, get_report_formatter().render(reports, config.format))
    return 0


def _ratio(config: RunConfig) -> int:
    service = get_bounds_service()
    service.tol, service.max_iters = config.tol, config.max_iters
    if config.starred:
        value = service.starred_ratio_estimate(config.variant, config.m)
    else:
        value = service.ratio_estimate(config.variant, config.m)
    formatter = get_report_formatter()
    if config.format == "json":
        record = {"variant": config.variant.value, "m": config.m, "starred": config.starred, "ratio": formatter.real(value)}
        _emit(config, json.dumps(record, indent=2) + "\n")
    elif config.format == "csv":
        _emit(config, f"variant,m,starred,ratio\n{config.variant.value},{config.m},"
                      f"{str(config.starred).lower()},{formatter.real_text(value)}\n")
    else:
        _emit(config, formatter.real_text(value) + "\n")
    return 0


def _glue(config: RunConfig) -> int:
    if config.stripe:
        left = make_stripe_witness(LEFT, config.height, config.width)
        right = make_stripe_witness(RIGHT, config.height, config.width)
    else:
        left = parse_cylinder(read_text_file(config.left))
        right = parse_cylinder(read_text_file(config.right))
    if config.search:
        result = exhaustive_glue_search(config.variant, left, right, config.k)
    else:
        result = glue(config.variant, left, right, config.k)
    if result is None:
        _emit(config, "absent\n")
        return 0
    broken = interior_violations(config.variant, result)
    if broken:
        logger.warning(f"Glued window breaks the rules at {broken[:5]}")
    _emit(config, format_cylinder(result))
    return 0


def _verify(config: RunConfig) -> int:
    pattern = parse_pattern(read_text_file(config.pattern))
    waived = ()
    if config.starred:
        valid = is_valid_starred(config.variant, pattern)
        waived = starred_rows(pattern.dims)
    else:
        valid = is_valid(config.variant, pattern, use_local_rules=not config.definition)
    broken = local_rule_violations(config.variant, pattern, waived_rows=waived) if config.explain else []
    lines = [get_report_formatter().verdict(valid)]
    if config.explain:
        lines += [f"{c[0]} {c[1]}" for c in broken]
    _emit(config, "\n".join(lines) + "\n")
    return 0


def _selftest(config: RunConfig) -> int:
    oracle = get_oracle()
    oracle.workers = config.workers
    transfer = get_transfer_service()
    formatter = get_report_formatter()
    rows, failures = [], 0
    for variant in Variant:
        for m in range(1, SELFTEST_MAX_CELLS + 1):
            for n in range(m, SELFTEST_MAX_CELLS // m + 1):
                dims = GridDims(n, m)
                brute = oracle.brute_force_count(variant, dims)
                counted = transfer.count_grid(variant, dims)
                failures += brute != counted
                rows.append(formatter.selftest_row(variant.value, n, m, brute, counted))
    rows.append(f"{len(rows) - failures} passed, {failures} failed")
    _emit(config, "\n".join(rows) + "\n")
    return 0 if failures == 0 else 1


def _dump(config: RunConfig) -> int:
    automaton = get_transfer_service().automaton(config.variant, config.m, config.starred)
    _emit(config, dump(automaton))
    return 0


COMMANDS = {
    "count": _count,
    "bounds": _bounds,
    "ratio": _ratio,
    "glue": _glue,
    "verify": _verify,
    "selftest": _selftest,
    "dump": _dump,
}


def run(config: RunConfig) -> int:
    """
    Dispatch a validated config.

    Returns:
        Exit status: 0 ok, 1 input error, 2 resource error, 3 non-convergence
    """
    try:
        return COMMANDS[config.subcommand](config)
    except GridTallyException as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except MemoryError:
        error = ResourceLimitException("out of memory")
        print(f"error: {error}", file=sys.stderr)
        return error.exit_code


def configure_logging(verbose: bool = False):
    level = logging.DEBUG if verbose else getattr(logging, settings.LOG_LEVEL.upper(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point: parse, configure logging, run."""
    try:
        config = parse_config(argv)
    except GridTallyException as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    configure_logging(config.verbose)
    return run(config)
