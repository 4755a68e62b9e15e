# wiener_lab/cli/main.py

import argparse
import logging
import math
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from wiener_lab.config import Config, get_config
from wiener_lab.constants import Compressor, Controller, Curve, LookaheadScheme, Scheme
from wiener_lab.control.simulator import simulate_soi_control, simulate_uniform_control
from wiener_lab.errors import InputError, NumericalError, ParameterError, SimulationError
from wiener_lab.evaluation.harness import mc_mse
from wiener_lab.evaluation.variants import delayed_channel_mse, lookahead_mse
from wiener_lab.idrf.closed_forms import closed_forms, dch
from wiener_lab.idrf.finite_n import idrf_limit, lower_bound_dn, upper_bound_dn
from wiener_lab.storage.results import ResultStore, render_csv
from wiener_lab.types import ExperimentConfig, RateDistortionPoint

logger = logging.getLogger(__name__)

RD_HEADER = ["method", "R", "f", "Rs", "reps", "horizon", "mse", "ci"]
CURVE_HEADER = ["curve", "R", "value"]
IDRF_HEADER = ["R", "f", "Rs", "N", "kind", "value"]
CONTROL_HEADER = ["controller", "R", "cost", "ci"]
FIG3_HEADER = ["curve", "R", "mse", "ci"]

# ==================== Argument Parsing ====================

def parse_range(text: str) -> List[float]:
    """
    'start:stop:step' (stop exclusive), a comma list, or one number.

    Example:
        >>> parse_range("0.5:2:0.5")
        [0.5, 1.0, 1.5]
    """
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0:
                raise ParameterError(f"range step must be positive in {text!r}")
            count = max(0, math.ceil((stop - start) / step - 1e-9))
            return [float(format(start + i * step, ".12g")) for i in range(count)]
        return [float(part) for part in text.split(",") if part.strip()]
    except ParameterError:
        raise
    except ValueError:
        raise ParameterError(f"cannot parse {text!r} as a number, list or start:stop:step range")


def parse_ints(text: str) -> List[int]:
    values = parse_range(text)
    if any(v != int(v) for v in values):
        raise ParameterError(f"expected integers, got {text!r}")
    return [int(v) for v in values]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"❌ {self.prog}: error: {message}\n")


def _common(parser: argparse.ArgumentParser, settings: Config) -> None:
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_MASTER_SEED,
                        help="Master seed (WIENER_LAB_SEED overrides)")
    parser.add_argument("--jobs", type=int, default=settings.DEFAULT_JOBS, help="Replication worker processes")
    parser.add_argument("--out", default=None, help="CSV output path (JSON metadata goes to <out>.json)")


def _monte_carlo(parser: argparse.ArgumentParser, rates_flag: str = "--rates") -> None:
    parser.add_argument(rates_flag, "--rate", dest="rates", default="1", help="Rates in bits/s")
    parser.add_argument("--horizon", type=float, default=None, help="Seconds per replication (default 10^4/R)")
    parser.add_argument("--reps", type=int, default=100, help="Replications")
    parser.add_argument("--step-h", type=float, default=None, help="Grid step in seconds")
    parser.add_argument("--bridge", action=argparse.BooleanOptionalAction, default=True,
                        help="Brownian-bridge crossing correction (--no-bridge for raw grid detection)")


def build_parser(settings: Optional[Config] = None) -> argparse.ArgumentParser:
    settings = settings or get_config()
    parser = _Parser(prog="wiener_lab", description="Wiener Lab - causal coding of the Wiener process")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    analytic = sub.add_parser("analytic", help="Closed-form distortion-rate curves")
    analytic.add_argument("--curves", default="dop,ddet,noncausal", help=f"Comma list of {Curve.list()}")
    analytic.add_argument("--rates", default="0.5:10:0.5")
    analytic.add_argument("--delta", type=float, default=0.0, help="Channel delay for the dch curve")
    _common(analytic, settings)

    simulate = sub.add_parser("simulate", help="Monte Carlo tracking MSE")
    simulate.add_argument("--scheme", choices=Scheme.list(), default=Scheme.SOI.value)
    simulate.add_argument("--rs", type=int, default=1, help="Bits per sample for uniform schemes")
    simulate.add_argument("--bins", type=int, default=settings.PDF_BINS, help="Pdf grid bins for Lloyd-Max design")
    _monte_carlo(simulate)
    _common(simulate, settings)

    idrf = sub.add_parser("idrf", help="Finite-N bounds and limit")
    idrf.add_argument("--f", default="1", help="Sampling frequencies")
    idrf.add_argument("--rs", default="1", help="Bits per sample")
    idrf.add_argument("--n", default="100,1000,10000", help="Program sizes N")
    idrf.add_argument("--asymmetric", action="store_true", help="Search T_0 and T_N independently")
    _common(idrf, settings)

    lookahead = sub.add_parser("lookahead", help="One-sample look-ahead decoders")
    lookahead.add_argument("--scheme", choices=LookaheadScheme.list(), default=LookaheadScheme.SOI_MIDPOINT.value)
    lookahead.add_argument("--compressor", choices=Compressor.list(), default=Compressor.TEST_CHANNEL.value)
    lookahead.add_argument("--bins", type=int, default=settings.PDF_BINS)
    _monte_carlo(lookahead)
    _common(lookahead, settings)

    delay = sub.add_parser("delay", help="SOI over a fixed-delay channel")
    delay.add_argument("--delta", default="0.2,0.5", help="Channel delays in seconds")
    _monte_carlo(delay)
    _common(delay, settings)

    control = sub.add_parser("control", help="Rate-limited impulse control")
    control.add_argument("--controller", choices=Controller.list(), default=Controller.SOI.value)
    control.add_argument("--bins", type=int, default=settings.PDF_BINS)
    _monte_carlo(control)
    _common(control, settings)

    sweep = sub.add_parser("sweep-fig3", help="MSE versus rate for SOI and uniform sampling")
    sweep.add_argument("--bins", type=int, default=settings.PDF_BINS)
    _monte_carlo(sweep)
    _common(sweep, settings)
    return parser

# ==================== Validation ====================

def validate_experiment(config: ExperimentConfig) -> Tuple[bool, Optional[str]]:
    """Cross-field checks that pydantic field validators cannot express."""
    if config.command in ("simulate", "lookahead", "delay", "control", "sweep-fig3") and config.reps < 2:
        return False, "at least 2 replications are required"
    if config.command == "delay" and not config.delta:
        return False, "delay needs at least one --delta"
    if config.command == "idrf" and (not config.n_list or not config.rs_list):
        return False, "idrf needs --n and --rs values"
    return True, None


def _horizon(config: ExperimentConfig, R: float) -> float:
    return config.horizon if config.horizon is not None else 1e4 / R


def _rd_row(point: RateDistortionPoint) -> list:
    return [point.method, point.R, point.f, point.Rs, point.reps, point.horizon, point.mse, point.ci_halfwidth]

# ==================== Commands ====================

def run_analytic(config: ExperimentConfig) -> Tuple[List[str], list]:
    curves = [Curve(name.strip()) for name in config.extra["curves"].split(",") if name.strip()]
    delta = config.delta[0] if config.delta else 0.0
    rows = []
    for curve in curves:
        for R in config.rates:
            forms = closed_forms(R)
            value = {
                Curve.DOP: forms.dop,
                Curve.DDET: forms.ddet,
                Curve.NONCAUSAL: forms.dnoncausal,
                Curve.DCH: dch(R, delta),
                Curve.SOI_LOOKAHEAD: forms.soi_lookahead,
                Curve.UNIFORM_LOOKAHEAD: forms.uniform_lookahead_total,
            }[curve]
            rows.append([curve.value, R, value])
    return CURVE_HEADER, rows


def run_simulate(config: ExperimentConfig) -> Tuple[List[str], list]:
    scheme = Scheme(config.extra["scheme"])
    Rs = config.rs_list[0] if config.rs_list else 1
    rows = []
    for R in config.rates:
        point = mc_mse(scheme, R, _horizon(config, R), config.reps, config.master_seed, config.step_h,
                       bits_per_sample=Rs, bridge=config.bridge, jobs=config.jobs, bins=config.extra["bins"])
        rows.append(_rd_row(point))
    return RD_HEADER, rows


def run_idrf(config: ExperimentConfig) -> Tuple[List[str], list]:
    symmetric = not config.extra.get("asymmetric", False)
    rows = []
    for f in config.rates:
        for Rs in config.rs_list:
            R = f * Rs
            for N in config.n_list:
                if N >= 2:
                    lower = lower_bound_dn(f, Rs, N, symmetric=symmetric)
                    rows.append([R, f, Rs, N, lower.kind.value, lower.value])
                upper = upper_bound_dn(f, Rs, N)
                rows.append([R, f, Rs, N, upper.kind.value, upper.value])
            rows.append([R, f, Rs, "inf", "limit", idrf_limit(f, Rs)])
    return IDRF_HEADER, rows


def run_lookahead(config: ExperimentConfig) -> Tuple[List[str], list]:
    scheme = LookaheadScheme(config.extra["scheme"])
    rows = []
    for R in config.rates:
        point = lookahead_mse(scheme, R, _horizon(config, R), config.reps, config.master_seed, config.step_h,
                              compressor=Compressor(config.extra["compressor"]), bridge=config.bridge,
                              jobs=config.jobs, bins=config.extra["bins"])
        rows.append(_rd_row(point))
    return RD_HEADER, rows


def run_delay(config: ExperimentConfig) -> Tuple[List[str], list]:
    rows = []
    for R in config.rates:
        for delta in config.delta:
            point = delayed_channel_mse(R, delta, _horizon(config, R), config.reps, config.master_seed,
                                        config.step_h, bridge=config.bridge, jobs=config.jobs)
            rows.append(_rd_row(point))
    return RD_HEADER, rows


def run_control(config: ExperimentConfig) -> Tuple[List[str], list]:
    controller = Controller(config.extra["controller"])
    rows = []
    for R in config.rates:
        horizon = _horizon(config, R)
        if controller == Controller.SOI:
            point = simulate_soi_control(R, horizon, config.reps, config.master_seed, config.step_h,
                                         bridge=config.bridge, jobs=config.jobs)
        else:
            point = simulate_uniform_control(R, horizon, config.reps, config.master_seed, config.step_h,
                                             jobs=config.jobs, bins=config.extra["bins"])
        rows.append([point.controller.value, R, point.cost, point.ci_halfwidth])
    return CONTROL_HEADER, rows


def sweep_figure3(config: ExperimentConfig) -> Tuple[List[str], list]:
    """Closed-form dop/ddet plus simulated SOI and greedy Lloyd-Max per rate."""
    rows = []
    for R in config.rates:
        horizon = _horizon(config, R)
        forms = closed_forms(R)
        soi = mc_mse(Scheme.SOI, R, horizon, config.reps, config.master_seed, config.step_h,
                     bridge=config.bridge, jobs=config.jobs)
        greedy = mc_mse(Scheme.UNIFORM_LLOYD, R, horizon, config.reps, config.master_seed,
                        jobs=config.jobs, bins=config.extra["bins"])
        rows.extend([
            ["dop", R, forms.dop, 0.0],
            ["ddet", R, forms.ddet, 0.0],
            [Scheme.SOI.value, R, soi.mse, soi.ci_halfwidth],
            [Scheme.UNIFORM_LLOYD.value, R, greedy.mse, greedy.ci_halfwidth],
        ])
    return FIG3_HEADER, rows


COMMANDS: Dict[str, Callable[[ExperimentConfig], Tuple[List[str], list]]] = {
    "analytic": run_analytic,
    "simulate": run_simulate,
    "idrf": run_idrf,
    "lookahead": run_lookahead,
    "delay": run_delay,
    "control": run_control,
    "sweep-fig3": sweep_figure3,
}

# ==================== Entry Point ====================

def to_config(args: argparse.Namespace, settings: Optional[Config] = None) -> ExperimentConfig:
    settings = settings or get_config()
    command = args.command

    extra = {key: getattr(args, key) for key in
             ("curves", "scheme", "compressor", "controller", "bins", "asymmetric") if hasattr(args, key)}
    if command == "idrf":
        rates, rs_list, n_list = parse_range(args.f), parse_ints(args.rs), parse_ints(args.n)
    else:
        rates = parse_range(args.rates)
        rs_list = [args.rs] if isinstance(getattr(args, "rs", None), int) else []
        n_list = []
    if command == "analytic":
        delta = [args.delta]
    elif command == "delay":
        delta = parse_range(args.delta)
    else:
        delta = []
    return ExperimentConfig(
        command=command,
        rates=rates,
        horizon=getattr(args, "horizon", None),
        reps=getattr(args, "reps", 100),
        step_h=getattr(args, "step_h", None),
        master_seed=settings.master_seed(args.seed),
        delta=delta,
        n_list=n_list,
        rs_list=rs_list,
        output=args.out,
        jobs=args.jobs,
        bridge=getattr(args, "bridge", True),
        extra=extra,
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one CLI command; returns 0 on success, 2 on bad parameters, 1 on runtime failure."""
    try:
        settings = get_config()
    except ValueError as e:
        logger.error(f"❌ Invalid environment: {e}")
        return 2
    logging.basicConfig(level=settings.LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = to_config(args, settings)
        ok, reason = validate_experiment(config)
        if not ok:
            raise ParameterError(reason)
        header, rows = COMMANDS[config.command](config)
        if config.output:
            ResultStore(config.output).save(header, rows, config.model_dump(mode="json"), command=config.command)
        else:
            sys.stdout.write(render_csv(header, rows))
        logger.info(f"✅ {config.command} finished with {len(rows)} rows")
        return 0
    except (ParameterError, InputError, ValidationError, ValueError) as e:
        logger.error(f"❌ Invalid parameters: {e}")
        return 2
    except (NumericalError, SimulationError) as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return 1
    except Exception as e:
        logger.error(f"❌ Unexpected failure: {e}")
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
