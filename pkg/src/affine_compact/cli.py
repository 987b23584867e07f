"""
Command-line entry point ``affine``.

Every subcommand reads a model file (``make`` writes one), writes its
report as JSON (or CSV where rows make sense) to stdout or ``--output``, and
exits 0 on success, 2 when the model file is unreadable or invalid, 1 for
every other failure. Failures are reported as JSON on stderr.
"""
import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from affine_compact.classify.generators import (
    make_birth_death,
    make_independent_product,
    make_layer_example,
    make_simplex,
)
from affine_compact.classify.one_dim import classify_1d
from affine_compact.classify.two_dim import classify_2d
from affine_compact.core.schema import load_model, model_to_document
from affine_compact.core.validation import validate_model
from affine_compact.counters.jump_counters import pairwise_case
from affine_compact.counters.transform import build_transform, channel_counters
from affine_compact.errors import (
    AffineError,
    ModelValidationError,
    NonPolynomialSystem,
    NotCounterCoordinates,
    ParameterError,
    ParseError,
    SchemaError,
)
from affine_compact.flows.verify_flow import build_report
from affine_compact.simulate.estimators import empirical_transform
from affine_compact.simulate.hybrid import (
    hybrid_state_at,
    hybrid_to_document,
    load_hybrid,
    make_drift_coupled_example,
    make_k1_example,
    simulate_hybrid,
)
from affine_compact.simulate.ssa import sample_at, simulate_ssa, state_counts
from affine_compact.transforms.closed_form import closed_form_transform
from affine_compact.transforms.oracle import transform_oracle
from affine_compact.transforms.riccati import RiccatiTransform
from affine_compact.transforms.zeros import SearchRectangle, find_psi_zero
from affine_compact.utilities.constants import (
    GENERATORS,
    ODE_TOLERANCE,
    OUTPUT_FORMATS,
    PSI_GRID_POINTS,
    SUBCOMMANDS,
    TRANSFORM_METHODS,
)
from affine_compact.utilities.formatting import complex_to_json, format_complex, parse_complex_list
from affine_compact.utilities.linalg import to_fraction

__all__ = ["CommandConfig", "load_model", "main", "run"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID_MODEL = 2

CSV_SUBCOMMANDS = ("transform", "simulate")
SEEDED_SUBCOMMANDS = ("simulate", "verify")


class CommandConfig(BaseModel):
    """Everything one invocation needs, checked before any model is touched."""
    model_config = ConfigDict(extra="forbid", protected_namespaces=())

    subcommand: SUBCOMMANDS
    model_path: Optional[str] = None
    output: Optional[str] = None
    format: OUTPUT_FORMATS = "json"

    # make
    generator: Optional[GENERATORS] = None
    N: Optional[int] = Field(default=None, ge=1)
    alpha: str = "1"
    beta: str = "1"
    d: int = Field(default=2, ge=1)
    rates: list[str] = Field(default_factory=list)
    N2: Optional[int] = Field(default=None, ge=1)
    alpha2: str = "1"
    beta2: str = "1"
    extra_base_points: int = Field(default=0, ge=0)

    # transform, verify, zeros
    u: Optional[str] = None
    t: Optional[float] = Field(default=None, ge=0)
    method: TRANSFORM_METHODS = "riccati"
    tolerance: float = Field(default=ODE_TOLERANCE, gt=0)
    re_min: float = -5.0
    re_max: float = 5.0
    im_min: float = 0.0
    im_max: float = 2 * np.pi
    grid_points: int = Field(default=PSI_GRID_POINTS, ge=2)

    # simulate, verify
    x0: Optional[list[float]] = None
    horizon: Optional[float] = Field(default=None, ge=0)
    paths: int = Field(default=1, ge=1)
    seed: Optional[int] = Field(default=None, ge=0)
    hybrid: bool = False

    @model_validator(mode="after")
    def _options_fit_subcommand(self):
        cmd = self.subcommand
        if cmd == "make":
            if self.generator is None:
                raise ValueError("make needs a generator")
            if self.generator in ("birth-death", "simplex", "product", "k1-example", "drift-coupled") and self.N is None:
                raise ValueError(f"make {self.generator} needs --N")
            if self.generator == "product" and self.N2 is None:
                raise ValueError("make product needs --N2")
        elif self.model_path is None:
            raise ValueError(f"{cmd} needs a model file")
        if self.format == "csv" and cmd not in CSV_SUBCOMMANDS:
            raise ValueError(f"CSV output is only available for {', '.join(CSV_SUBCOMMANDS)}")
        if cmd in SEEDED_SUBCOMMANDS and self.seed is None:
            raise ValueError(f"{cmd} is randomized and needs an explicit --seed")
        if cmd == "transform" and self.u is not None and self.t is None:
            raise ValueError("transform --u needs --t")
        if cmd == "verify" and (self.u is None or self.t is None):
            raise ValueError("verify needs --u and --t")
        if cmd == "zeros" and not self.t:
            raise ValueError("zeros needs --t > 0")
        if cmd == "zeros" and (self.re_min > self.re_max or self.im_min > self.im_max):
            raise ValueError("zeros search rectangle is empty")
        if cmd == "simulate" and (self.x0 is None or self.horizon is None):
            raise ValueError("simulate needs --x0 and --horizon")
        if cmd == "simulate" and self.hybrid and len(self.x0) != 2:
            raise ValueError("simulate --hybrid needs --x0 y z")
        if self.x0 is not None and not self.hybrid and any(v != int(v) for v in self.x0):
            raise ValueError(f"--x0 must be a lattice point, got {self.x0}")
        return self


@dataclass
class CommandResult:
    """JSON payload plus, for tabular commands, the rows written as CSV."""
    payload: dict
    rows: Optional[list[dict]] = None
    exit_code: int = EXIT_OK


def _lattice_point(values: list[float]) -> list[int]:
    return [int(v) for v in values]


def _parse_rates(specs: list[str]) -> Optional[dict]:
    """Entries like 0,1=2/3 into {(j, k): rate}."""
    if not specs:
        return None
    rates = {}
    for entry in specs:
        try:
            pair, value = entry.split("=")
            j, k = (int(v) for v in pair.split(","))
        except ValueError as e:
            raise ParameterError(f"Cannot parse rate {entry!r}; expected j,k=value") from e
        rates[(j, k)] = to_fraction(value)
    return rates


def _values_payload(values: dict) -> list[dict]:
    return [{"x": list(x), **complex_to_json(v)} for x, v in values.items()]


def _values_rows(values: dict) -> list[dict]:
    return [{**{f"x{j + 1}": v for j, v in enumerate(x)}, "re": z.real, "im": z.imag} for x, z in values.items()]


def cmd_validate(config: CommandConfig) -> CommandResult:
    report = validate_model(load_model(config.model_path))
    return CommandResult({"status": "valid", **report.to_dict()})


def cmd_counters(config: CommandConfig) -> CommandResult:
    model = load_model(config.model_path)
    validate_model(model)
    counters = channel_counters(model)
    pairs = [{"u": list(a.jump), "v": list(b.jump), **pairwise_case(a, b).to_dict()}
             for i, a in enumerate(counters) for b in counters[i + 1:]]
    return CommandResult({"counters": [c.to_dict() for c in counters], "pairs": pairs})


def cmd_transform_structure(config: CommandConfig) -> CommandResult:
    model = load_model(config.model_path)
    payload = build_transform(model).to_dict()
    try:
        payload["riccati"] = RiccatiTransform(model).system.to_dict()
    except (NotCounterCoordinates, NonPolynomialSystem) as e:
        payload["riccati"] = {"unavailable": e.message}
    return CommandResult(payload)


def cmd_classify(config: CommandConfig) -> CommandResult:
    model = load_model(config.model_path)
    if model.dimension == 1:
        return CommandResult(classify_1d(model).to_dict())
    if model.dimension == 2:
        return CommandResult(classify_2d(model, build_transform(model)).to_dict())
    raise ParameterError(f"classify covers d = 1 and d = 2, got d={model.dimension}")


def cmd_make(config: CommandConfig) -> CommandResult:
    generators: dict[str, Callable[[], dict]] = {
        "birth-death": lambda: model_to_document(make_birth_death(config.N, config.alpha, config.beta)),
        "simplex": lambda: model_to_document(make_simplex(config.d, config.N, _parse_rates(config.rates))),
        "layer-example": lambda: model_to_document(make_layer_example(config.extra_base_points)),
        "product": lambda: model_to_document(make_independent_product(
            config.N, config.alpha, config.beta, config.N2, config.alpha2, config.beta2)),
        "k1-example": lambda: hybrid_to_document(make_k1_example(config.N)),
        "drift-coupled": lambda: hybrid_to_document(make_drift_coupled_example(config.N)),
    }
    return CommandResult(generators[config.generator]())


def cmd_transform(config: CommandConfig) -> CommandResult:
    if config.u is None:
        return cmd_transform_structure(config)
    model = load_model(config.model_path)
    u = parse_complex_list(config.u)
    payload = {"method": config.method, "u": [format_complex(v) for v in u], "t": config.t}
    if config.method == "riccati":
        transform = RiccatiTransform(model)
        values = transform.values(u, config.t, config.tolerance)
        payload["counter_map"] = transform.map.to_dict()
        payload["phi_psi"] = transform.solve(u, config.t, config.tolerance).to_dict()
    elif config.method == "oracle":
        values = transform_oracle(model, u, config.t)
    else:
        values = closed_form_transform(model, u, config.t)
    payload["values"] = _values_payload(values)
    return CommandResult(payload, _values_rows(values))


def _simulate_lattice(config: CommandConfig) -> CommandResult:
    model = load_model(config.model_path)
    x0 = _lattice_point(config.x0)
    if config.paths == 1:
        trajectory = simulate_ssa(model, x0, config.horizon, config.seed)
        rows = trajectory.to_rows()
        return CommandResult({"horizon": config.horizon, "n_jumps": trajectory.n_jumps, "events": rows}, rows)
    samples = sample_at(model, x0, config.horizon, config.paths, config.seed)
    rows = [{"path": p, **{f"x{j + 1}": int(v) for j, v in enumerate(s)}} for p, s in enumerate(samples)]
    counts = [{"x": list(x), "count": c} for x, c in state_counts(samples).items()]
    return CommandResult({"horizon": config.horizon, "n_paths": config.paths, "counts": counts}, rows)


def _simulate_hybrid(config: CommandConfig) -> CommandResult:
    hmodel = load_hybrid(config.model_path)
    if config.paths == 1:
        trajectory = simulate_hybrid(hmodel, config.x0, config.horizon, config.seed)
        rows = trajectory.to_rows()
        return CommandResult({
            "horizon": config.horizon,
            "n_y_jumps": trajectory.n_y_jumps,
            "n_z_jumps": trajectory.n_z_jumps,
            "z_jump_sizes": list(trajectory.z_jump_sizes),
            "contained": trajectory.contained(hmodel),
            "segments": rows,
        }, rows)
    rows, contained = [], True
    for p in range(config.paths):
        trajectory = simulate_hybrid(hmodel, config.x0, config.horizon, config.seed, stream=p)
        contained = contained and trajectory.contained(hmodel)
        y, z = hybrid_state_at(trajectory, hmodel, config.horizon)
        rows.append({"path": p, "y": y, "z": z})
    return CommandResult({"horizon": config.horizon, "n_paths": config.paths, "contained": contained,
                          "samples": rows}, rows)


def cmd_simulate(config: CommandConfig) -> CommandResult:
    return _simulate_hybrid(config) if config.hybrid else _simulate_lattice(config)


def cmd_verify(config: CommandConfig) -> CommandResult:
    """Sequential rendition of verify_flow for use without a Prefect server."""
    model = load_model(config.model_path)
    u = parse_complex_list(config.u)
    if len(u) != model.dimension:
        raise ParameterError(f"Expected {model.dimension} components of u, got {len(u)}")
    x0 = tuple(_lattice_point(config.x0)) if config.x0 is not None else model.space.points[-1]
    if x0 not in model.space:
        raise ParameterError(f"x0 = {x0} is not in E")
    riccati = RiccatiTransform(model).values(u, config.t, config.tolerance)
    oracle = transform_oracle(model, u, config.t)
    closed = None
    if model.dimension == 1:
        try:
            closed = closed_form_transform(model, u, config.t)
        except AffineError as e:
            logger.info(f"No closed form: {e.message}")
    samples = sample_at(model, x0, config.t, config.paths, config.seed)
    report = build_report(u, config.t, x0, riccati, oracle, closed, empirical_transform(samples, u))
    return CommandResult(report, exit_code=EXIT_OK if report["passed"] else EXIT_FAILURE)


def cmd_zeros(config: CommandConfig) -> CommandResult:
    """
    Zero of Psi in the rectangle given in the model's own u coordinate. The
    search runs in counter coordinates, where u_y = u / a for y = a x + c.
    """
    model = load_model(config.model_path)
    if model.dimension != 1:
        raise ParameterError(f"zeros needs a one-dimensional model, got d={model.dimension}")
    transform = RiccatiTransform(model)
    a = float(transform.map.matrix[0][0])
    re = sorted((config.re_min / a, config.re_max / a))
    im = sorted((config.im_min / a, config.im_max / a))
    root = find_psi_zero(transform.system, config.t, SearchRectangle(re[0], re[1], im[0], im[1]), config.grid_points)
    payload = {"t": config.t,
               "rectangle": {"re": [config.re_min, config.re_max], "im": [config.im_min, config.im_max]},
               "zero": None}
    if root is not None:
        u = root * a
        payload["zero"] = complex_to_json(u)
        payload["abs_psi"] = abs(transform.solve([u], config.t).psi[0])
    return CommandResult(payload)


COMMANDS: dict[str, Callable[[CommandConfig], CommandResult]] = {
    "validate": cmd_validate,
    "counters": cmd_counters,
    "transform-structure": cmd_transform_structure,
    "classify": cmd_classify,
    "make": cmd_make,
    "transform": cmd_transform,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "zeros": cmd_zeros,
}


def _render(config: CommandConfig, result: CommandResult) -> str:
    if config.format == "csv" and result.rows is not None:
        buffer = io.StringIO()
        fields = list(result.rows[0].keys()) if result.rows else []
        writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(result.rows)
        return buffer.getvalue()
    return json.dumps(result.payload, indent=2) + "\n"


def _write(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _fail(payload: dict, code: int) -> int:
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def run(config: CommandConfig) -> int:
    try:
        result = COMMANDS[config.subcommand](config)
        _write(_render(config, result), config.output)
        return result.exit_code
    except (ModelValidationError, SchemaError, ParseError) as e:
        return _fail(e.to_dict(), EXIT_INVALID_MODEL)
    except AffineError as e:
        return _fail(e.to_dict(), EXIT_FAILURE)
    except Exception as e:
        logger.exception(f"affine {config.subcommand} failed")
        return _fail({"error": "InternalError", "message": str(e)}, EXIT_FAILURE)


class _JsonArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        _fail({"error": "UsageError", "message": message}, EXIT_FAILURE)
        sys.exit(EXIT_FAILURE)


def build_parser() -> argparse.ArgumentParser:
    parser = _JsonArgumentParser(prog="affine", description="Affine jump processes on compact state spaces")
    parser.add_argument("--verbose", "-v", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_JsonArgumentParser)

    def with_model(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("model_path")
        p.add_argument("--output", "-o")
        return p

    with_model("validate", "validate a model file")
    with_model("counters", "jump counters and their pairwise cases")
    with_model("transform-structure", "counter transform T, k and the Riccati system")
    with_model("classify", "classify a d = 1 or d = 2 model")

    p = sub.add_parser("make", help="write a built-in model as JSON")
    p.add_argument("generator", choices=["birth-death", "simplex", "layer-example", "product",
                                         "k1-example", "drift-coupled"])
    p.add_argument("--output", "-o")
    p.add_argument("--N", type=int)
    p.add_argument("--alpha", default="1")
    p.add_argument("--beta", default="1")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--rate", dest="rates", action="append", default=[], help="j,k=value for the simplex jump e_j - e_k")
    p.add_argument("--N2", type=int)
    p.add_argument("--alpha2", default="1")
    p.add_argument("--beta2", default="1")
    p.add_argument("--extra-base-points", type=int, default=0)

    p = with_model("transform", "E_x[exp(<u, X_t>)] for every x")
    p.add_argument("--u", help='comma separated complex numbers "a+bi"')
    p.add_argument("--t", type=float)
    p.add_argument("--method", choices=["riccati", "oracle", "closed-form"], default="riccati")
    p.add_argument("--tolerance", type=float, default=ODE_TOLERANCE)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--csv", dest="format", action="store_const", const="csv")

    p = with_model("simulate", "exact simulation; one path of events or endpoint samples")
    p.add_argument("--x0", type=float, nargs="+", required=True)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--paths", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--hybrid", action="store_true", help="model file is a hybrid (Y, Z) document")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--csv", dest="format", action="store_const", const="csv")

    p = with_model("verify", "Riccati, oracle and Monte Carlo agreement report")
    p.add_argument("--u", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--seed", type=int)
    p.add_argument("--x0", type=float, nargs="+")
    p.add_argument("--tolerance", type=float, default=ODE_TOLERANCE)

    p = with_model("zeros", "search for u with Psi(u, t) = 0")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--re-min", type=float, default=-5.0)
    p.add_argument("--re-max", type=float, default=5.0)
    p.add_argument("--im-min", type=float, default=0.0)
    p.add_argument("--im-max", type=float, default=2 * np.pi)
    p.add_argument("--grid-points", type=int, default=PSI_GRID_POINTS)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = vars(build_parser().parse_args(argv))
    logging.basicConfig(level=logging.DEBUG if args.pop("verbose") else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = CommandConfig(**args)
    except ValidationError as e:
        errors = [{"option": ".".join(str(p) for p in err["loc"]), "message": err["msg"]} for err in e.errors()]
        return _fail({"error": "ParameterError", "message": "Invalid command options", "errors": errors},
                     EXIT_FAILURE)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
