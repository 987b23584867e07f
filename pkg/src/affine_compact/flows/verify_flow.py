"""
Three-way transform check: Riccati solve, uniformization oracle and Monte
Carlo, plus the closed form when the model is a one-dimensional birth–death
process.
"""
from typing import List, Optional

import prefect
from prefect import flow, task
from prefect.artifacts import create_markdown_artifact
from prefect.cache_policies import NO_CACHE
from prefect.task_runners import ThreadPoolTaskRunner

from affine_compact.core.models import AffineModel, Point
from affine_compact.core.schema import load_model
from affine_compact.errors import AffineError, ParameterError
from affine_compact.flows.simulation_flow import run_ensemble
from affine_compact.simulate.estimators import TransformEstimate, empirical_transform
from affine_compact.transforms.closed_form import closed_form_transform
from affine_compact.transforms.oracle import transform_oracle
from affine_compact.transforms.riccati import RiccatiTransform
from affine_compact.utilities.constants import (
    AFFINE_NUM_THREADS,
    CLOSED_FORM_TOLERANCE,
    DEFAULT_CHUNK_SIZE,
    RICCATI_ORACLE_TOLERANCE,
    SE_MULTIPLIER,
)
from affine_compact.utilities.formatting import complex_to_json, format_complex, parse_complex_list


@task(cache_policy=NO_CACHE)
def riccati_values(model: AffineModel, u: List[complex], t: float) -> dict[Point, complex]:
    return RiccatiTransform(model).values(u, t)


@task(cache_policy=NO_CACHE)
def oracle_values(model: AffineModel, u: List[complex], t: float) -> dict[Point, complex]:
    return transform_oracle(model, u, t)


@task(cache_policy=NO_CACHE)
def closed_form_values(model: AffineModel, u: List[complex], t: float) -> Optional[dict[Point, complex]]:
    """Only for one-dimensional models; None when the closed form does not apply."""
    if model.dimension != 1:
        return None
    try:
        return closed_form_transform(model, u, t)
    except AffineError as e:
        prefect.get_run_logger().info(f"No closed form: {e.message}")
        return None


def build_report(u: List[complex], t: float, x0: Point, riccati: dict, oracle: dict,
                 closed: Optional[dict], monte_carlo: TransformEstimate) -> dict:
    riccati_gap = max(abs(riccati[x] - oracle[x]) for x in oracle)
    report = {
        "u": [format_complex(v) for v in u],
        "t": t,
        "x0": list(x0),
        "states": [
            {"x": list(x), "riccati": complex_to_json(riccati[x]), "oracle": complex_to_json(oracle[x]),
             **({"closed_form": complex_to_json(closed[x])} if closed is not None else {})}
            for x in oracle
        ],
        "riccati_vs_oracle": {"max_abs": riccati_gap, "tolerance": RICCATI_ORACLE_TOLERANCE,
                              "agree": riccati_gap < RICCATI_ORACLE_TOLERANCE},
        "monte_carlo": {**monte_carlo.to_dict(), "target": complex_to_json(oracle[x0]),
                        "se_multiplier": SE_MULTIPLIER, "agree": monte_carlo.within(oracle[x0])},
    }
    checks = [report["riccati_vs_oracle"]["agree"], report["monte_carlo"]["agree"]]
    if closed is not None:
        closed_gap = max(abs(closed[x] - riccati[x]) for x in oracle)
        report["closed_form_vs_riccati"] = {"max_abs": closed_gap, "tolerance": CLOSED_FORM_TOLERANCE,
                                            "agree": closed_gap < CLOSED_FORM_TOLERANCE}
        checks.append(report["closed_form_vs_riccati"]["agree"])
    report["passed"] = all(checks)
    return report


def report_markdown(report: dict) -> str:
    lines = [
        f"# Transform verification at u = {', '.join(report['u'])}, t = {report['t']}",
        "",
        "| check | value | verdict |",
        "|:------|------:|:-------:|",
        f"| max riccati - oracle | {report['riccati_vs_oracle']['max_abs']:.3e} | "
        f"{'ok' if report['riccati_vs_oracle']['agree'] else 'FAIL'} |",
    ]
    if "closed_form_vs_riccati" in report:
        lines.append(f"| max closed form - riccati | {report['closed_form_vs_riccati']['max_abs']:.3e} | "
                     f"{'ok' if report['closed_form_vs_riccati']['agree'] else 'FAIL'} |")
    mc = report["monte_carlo"]
    lines.append(f"| Monte Carlo at x0 = {report['x0']} (n = {mc['n']}) | "
                 f"{mc['re']:.5f}{mc['im']:+.5f}i | {'ok' if mc['agree'] else 'FAIL'} |")
    return "\n".join(lines)


@flow(name="affine-verify-flow", log_prints=True, timeout_seconds=3600,
      task_runner=ThreadPoolTaskRunner(max_workers=AFFINE_NUM_THREADS))
def verify_flow(model_path: str, u: List[str], t: float, n_paths: int, seed: int,
                x0: Optional[List[int]] = None) -> dict:
    logger = prefect.get_run_logger()
    model = load_model(model_path)
    u_values = parse_complex_list(u)
    if len(u_values) != model.dimension:
        raise ParameterError(f"Expected {model.dimension} components of u, got {len(u_values)}")
    start = tuple(x0) if x0 is not None else model.space.points[-1]
    if start not in model.space:
        raise ParameterError(f"x0 = {start} is not in E")

    riccati = riccati_values.submit(model, u_values, t)
    oracle = oracle_values.submit(model, u_values, t)
    closed = closed_form_values.submit(model, u_values, t)
    samples = run_ensemble(model, list(start), [t], n_paths, seed, DEFAULT_CHUNK_SIZE)[0]
    estimate = empirical_transform(samples, u_values)

    report = build_report(u_values, t, start, riccati.result(), oracle.result(), closed.result(), estimate)
    logger.info(f"Verification {'passed' if report['passed'] else 'FAILED'} for {model.name or model_path}")
    create_markdown_artifact(report_markdown(report), key="affine-verify-report",
                             description=f"Transform verification of {model.name or model_path}")
    return report


if __name__ == '__main__':
    # Example: a birth–death model file written by `affine make birth-death`.
    verify_flow(model_path="birth_death_3.json", u=["0.3+0.5i"], t=1.0, n_paths=100_000, seed=7)
