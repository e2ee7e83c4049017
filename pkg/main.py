#!/usr/bin/env python3
"""
dunkl: point evaluations and verification sweeps for Dunkl-type Bessel functions.

    dunkl eval <jack|besselA|besselB|j1d|cone|hc-oracle> [flags]
    dunkl verify <prop11|prop12|lemma31|lemma32|onedim|conjecture> [flags]

stdout carries JSON lines (or CSV with --csv); logs go to stderr.

A verify run with every sweep flag at its default is the reference sweep for its
(subject, N, k2, seed). Reference sweeps are checked against ceilings.json next
to this file; the first passing reference run of a key mints its ceiling
(1.5 x the empirical constant) there.

Exit codes:
    0 - success, or a passing report
    1 - numeric failure: vanishing Pochhammer symbol, singular oracle,
        non-converged series, failed ceiling
    2 - usage or domain error
"""

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, TextIO

from pydantic import BaseModel, ValidationError

from bessel import (
    besselA,
    besselB,
    besselB_at_imag,
    bessel_j,
    bessel_j_imag,
    cone_bessel,
    harish_chandra_0F0,
)
from errors import DomainError, DunklError
from jack import EvalVector, JackEvaluator, JackParameter
from jack_oracle import exact_jack_C, expansion_json
from models import (
    ARTIFACT_VERSION,
    DEFAULT_ABS_TOL,
    DEFAULT_MAX_NORM_PRODUCT,
    DEFAULT_MAX_WEIGHT,
    DEFAULT_POINT_BOX,
    DEFAULT_REL_TOL,
    DEFAULT_SMALL_FRACTION,
    PROPOSITION_MAX_WEIGHT,
    CheckReport,
    MultiplicityB,
    OutputRecord,
    SeriesPolicy,
    SeriesResult,
    SweepConfig,
    VerificationReport,
    to_json,
)
from partitions import Partition
from verify import (
    VerificationHarness,
    default_onedim_grid,
    generate_points,
    lemma31_sweep,
    lemma32_sweep,
    onedim_sweep,
)

logger = logging.getLogger(__name__)

EVAL_SUBJECTS = ("jack", "besselA", "besselB", "j1d", "cone", "hc-oracle")
VERIFY_SUBJECTS = ("prop11", "prop12", "lemma31", "lemma32", "onedim", "conjecture")

DEFAULT_MU_GRID = "10,100,1000,10000"
DEFAULT_ONEDIM_MU_GRID = "4,16,64,256"
LEMMA_MAX_WEIGHT = 8
MINT_FACTOR = 1.5
REFERENCE_CEILING_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "ceilings.json")
MINTED_SUBJECTS = ("prop11", "prop12", "onedim")

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2


def configure_logging(debug: bool = False) -> None:
    """Configure the root logger once, on stderr."""
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def parse_floats(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as e:
        raise DomainError(f"malformed list of reals {text!r}: {e}") from e


def ceiling_key(subject: str, N: int, k2: float, seed: int) -> str:
    return f"{subject}:N={N}:k2={k2:g}:seed={seed}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dunkl", description=__doc__.splitlines()[1])
    commands = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, max_weight: Optional[int]) -> None:
        p.add_argument("--max-weight", type=int, default=max_weight,
                       help="largest partition weight summed (or checked, for the lemmas)")
        p.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL)
        p.add_argument("--abs-tol", type=float, default=DEFAULT_ABS_TOL)
        p.add_argument("--debug", action="store_true", help="log at DEBUG level")

    ev = commands.add_parser("eval", help="evaluate one function at one point")
    ev.add_argument("subject", choices=EVAL_SUBJECTS)
    ev.add_argument("--alpha", type=float, help="Jack parameter, or Bessel order for j1d")
    ev.add_argument("--lambda", dest="lam", type=str, help="partition, e.g. 3,1")
    ev.add_argument("--x", type=str, help="comma-separated reals")
    ev.add_argument("--y", type=str, help="comma-separated reals")
    ev.add_argument("--t", type=float, help="argument of j1d")
    ev.add_argument("--k1", type=float)
    ev.add_argument("--k2", type=float)
    ev.add_argument("--N", type=int)
    ev.add_argument("--mu", type=float)
    ev.add_argument("--d", type=int, help="cone dimension 1, 2 or 4")
    ev.add_argument("--imag-y", action="store_true", help="evaluate at the imaginary second argument iy")
    ev.add_argument("--exact", action="store_true", help="jack: also print the exact rational value")
    common(ev, DEFAULT_MAX_WEIGHT)

    vr = commands.add_parser("verify", help="run a verification sweep")
    vr.add_argument("subject", choices=VERIFY_SUBJECTS)
    vr.add_argument("--N", type=int, default=2)
    vr.add_argument("--k2", type=float, default=1.0)
    vr.add_argument("--k1", type=str, help="lemma32: comma-separated k1 grid")
    vr.add_argument("--alpha", type=float, default=1.0, help="lemma31: Jack parameter")
    vr.add_argument("--mu", type=str, help="comma-separated increasing mu grid")
    vr.add_argument("--seed", type=int, default=0)
    vr.add_argument("--points", type=int)
    vr.add_argument("--ceiling", type=float)
    vr.add_argument("--ceiling-file", type=str, default=REFERENCE_CEILING_FILE,
                    help="JSON map of frozen ceilings; the repository map by default")
    vr.add_argument("--mint-ceiling", action="store_true",
                    help="store 1.5 x the empirical constant in --ceiling-file")
    vr.add_argument("--out", type=str, help="output file; stdout when omitted")
    vr.add_argument("--csv", action="store_true", help="write records as CSV")
    vr.add_argument("--workers", type=int, default=1)
    vr.add_argument("--box", type=float, default=None)
    vr.add_argument("--max-norm-product", type=float, default=DEFAULT_MAX_NORM_PRODUCT)
    vr.add_argument("--small-fraction", type=float, default=DEFAULT_SMALL_FRACTION)
    common(vr, None)
    return parser


class CommandRunner:
    """
    Runs one parsed command and writes its output.
    """

    def __init__(self, args: argparse.Namespace, stdout: TextIO):
        """
        Args:
            args: Parsed command line.
            stdout: Stream for JSON or CSV output.
        """
        self.args = args
        self.stdout = stdout
        self.policy = self._policy()

    def _policy(self) -> SeriesPolicy:
        max_weight = self.args.max_weight
        if max_weight is None:
            max_weight = PROPOSITION_MAX_WEIGHT
        try:
            return SeriesPolicy(max_weight=max_weight, rel_tol=self.args.rel_tol, abs_tol=self.args.abs_tol)
        except ValidationError as e:
            raise DomainError(f"invalid series policy: {e}") from e

    def run(self) -> int:
        try:
            if self.args.command == "eval":
                return self.run_eval()
            return self.run_verify()
        except ValidationError as e:
            raise DomainError(f"invalid configuration: {e}") from e

    # eval

    def _require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self.args, n) is None]
        if missing:
            flags = ", ".join("--" + ("lambda" if n == "lam" else n.replace("_", "-")) for n in missing)
            raise DomainError(f"eval {self.args.subject} needs {flags}")

    def _vector(self, name: str) -> EvalVector:
        self._require(name)
        return EvalVector.parse(getattr(self.args, name))

    def _emit(self, inputs: Dict[str, Any], outputs: Dict[str, Any]) -> None:
        inputs = dict(inputs)
        inputs.update({
            "max_weight": self.policy.max_weight,
            "rel_tol": self.policy.rel_tol,
            "abs_tol": self.policy.abs_tol,
        })
        record = OutputRecord(
            command=f"{self.args.command} {self.args.subject}",
            inputs=inputs,
            outputs=outputs,
            versions={"artifact": ARTIFACT_VERSION, "policy": self.policy.policy_id},
        )
        self.stdout.write(to_json(record) + "\n")

    @staticmethod
    def _series_outputs(result: SeriesResult) -> Dict[str, Any]:
        return {
            "value": result.value,
            "tail_bound": result.tail_bound,
            "weights_summed": result.weights_summed,
            "converged": result.converged,
            "rigorous": result.rigorous,
        }

    def run_eval(self) -> int:
        handler = {
            "jack": self.eval_jack,
            "besselA": self.eval_besselA,
            "besselB": self.eval_besselB,
            "j1d": self.eval_j1d,
            "cone": self.eval_cone,
            "hc-oracle": self.eval_hc_oracle,
        }[self.args.subject]
        return handler()

    def eval_jack(self) -> int:
        self._require("lam")
        lam = Partition.parse(self.args.lam)
        x = self._vector("x")
        if self.args.alpha is not None:
            alpha = JackParameter(self.args.alpha)
        elif self.args.k2 is not None:
            alpha = JackParameter.from_multiplicity(self.args.k2)
        else:
            raise DomainError("eval jack needs --alpha or --k2")
        value = JackEvaluator(alpha, x).C(lam)
        outputs: Dict[str, Any] = {"value": value}
        if self.args.exact:
            exact = exact_jack_C(lam, alpha.alpha, [Fraction(c) for c in x.coords])
            outputs["exact"] = f"{exact.numerator}/{exact.denominator}"
            outputs["expansion"] = json.loads(expansion_json(lam, alpha.alpha, x.N))
        self._emit({"alpha": alpha.alpha, "lambda": list(lam.parts), "x": list(x.coords)}, outputs)
        return EXIT_OK

    def eval_besselA(self) -> int:
        self._require("k2")
        x, y = self._vector("x"), self._vector("y")
        result = besselA(self.args.k2, x, y, self.policy)
        self._emit({"k2": self.args.k2, "x": list(x.coords), "y": list(y.coords)}, self._series_outputs(result))
        return EXIT_OK if result.converged else EXIT_NUMERIC

    def eval_besselB(self) -> int:
        self._require("k1", "k2")
        x, y = self._vector("x"), self._vector("y")
        N = self.args.N if self.args.N is not None else x.N
        mult = MultiplicityB(k1=self.args.k1, k2=self.args.k2, N=N)
        fn = besselB_at_imag if self.args.imag_y else besselB
        result = fn(mult, x, y, self.policy)
        inputs = {
            "k1": mult.k1, "k2": mult.k2, "N": N, "mu": mult.mu,
            "x": list(x.coords), "y": list(y.coords), "imag_y": self.args.imag_y,
        }
        self._emit(inputs, self._series_outputs(result))
        return EXIT_OK if result.converged else EXIT_NUMERIC

    def eval_j1d(self) -> int:
        self._require("alpha", "t")
        fn = bessel_j_imag if self.args.imag_y else bessel_j
        value = fn(self.args.alpha, self.args.t)
        self._emit({"alpha": self.args.alpha, "t": self.args.t, "imag": self.args.imag_y}, {"value": value})
        return EXIT_OK

    def eval_cone(self) -> int:
        self._require("mu", "d")
        x = self._vector("x")
        result = cone_bessel(self.args.mu, self.args.d, x, self.policy)
        self._emit({"mu": self.args.mu, "d": self.args.d, "eigenvalues": list(x.coords)},
                   self._series_outputs(result))
        return EXIT_OK if result.converged else EXIT_NUMERIC

    def eval_hc_oracle(self) -> int:
        x, y = self._vector("x"), self._vector("y")
        value = harish_chandra_0F0(x, y)
        self._emit({"x": list(x.coords), "y": list(y.coords)}, {"value": value})
        return EXIT_OK

    # verify

    def _mu_grid(self, default: str) -> List[float]:
        return parse_floats(self.args.mu if self.args.mu is not None else default)

    def _is_reference(self) -> bool:
        """True when every sweep knob is at its default, i.e. this is the reference sweep for its key."""
        args = self.args
        return (
            args.mu is None
            and args.points is None
            and args.box is None
            and args.max_norm_product == DEFAULT_MAX_NORM_PRODUCT
            and args.small_fraction == DEFAULT_SMALL_FRACTION
            and args.max_weight is None
            and args.rel_tol == DEFAULT_REL_TOL
            and args.abs_tol == DEFAULT_ABS_TOL
        )

    def _load_ceilings(self) -> Dict[str, float]:
        path = self.args.ceiling_file
        if not path or not os.path.exists(path):
            return {}
        with open(path) as f:
            return json.load(f)

    def _ceiling(self, key: str) -> Optional[float]:
        if self.args.ceiling is not None:
            return self.args.ceiling
        if self.args.mint_ceiling:
            return None
        # the repository map holds reference sweeps only
        if self.args.ceiling_file == REFERENCE_CEILING_FILE and not self._is_reference():
            return None
        ceilings = self._load_ceilings()
        if key in ceilings:
            logger.info(f"Using ceiling {key}={ceilings[key]:g} from {self.args.ceiling_file}")
            return float(ceilings[key])
        if self._is_reference():
            logger.info(f"No ceiling for {key} yet; minting one if this reference run passes")
        else:
            logger.warning(f"No ceiling for {key} in {self.args.ceiling_file}")
        return None

    def _mint(self, key: str, constant: float, ceiling: Optional[float], passed: bool) -> None:
        first_reference_run = (
            self.args.subject in MINTED_SUBJECTS
            and ceiling is None
            and passed
            and self._is_reference()
        )
        if not (self.args.mint_ceiling or first_reference_run):
            return
        if not self.args.ceiling_file:
            if self.args.mint_ceiling:
                raise DomainError("--mint-ceiling needs --ceiling-file")
            return
        ceilings = self._load_ceilings()
        ceilings[key] = MINT_FACTOR * constant
        with open(self.args.ceiling_file, "w") as f:
            json.dump(ceilings, f, indent=2, sort_keys=True)
            f.write("\n")
        logger.info(f"Minted ceiling {key}={ceilings[key]:g} in {self.args.ceiling_file}")

    def _write(self, report: BaseModel) -> None:
        if self.args.csv:
            text = _records_csv(report)
        else:
            text = to_json(report) + "\n"
        if self.args.out:
            with open(self.args.out, "w", newline="") as f:
                f.write(text)
            logger.info(f"Wrote {self.args.out}")
        else:
            self.stdout.write(text)

    def run_verify(self) -> int:
        subject = self.args.subject
        if subject in ("prop11", "prop12", "conjecture"):
            report = self.verify_proposition()
            passed = report.passed
        elif subject == "lemma31":
            report = lemma31_sweep(
                self.args.N, self.args.alpha,
                self.args.max_weight if self.args.max_weight is not None else LEMMA_MAX_WEIGHT,
                self.args.points if self.args.points is not None else 100,
                self.args.seed,
                box=self.args.box if self.args.box is not None else 2.0,
            )
            passed = report.passed
        elif subject == "lemma32":
            report = lemma32_sweep(
                self.args.N, self.args.k2,
                self.args.max_weight if self.args.max_weight is not None else LEMMA_MAX_WEIGHT,
                parse_floats(self.args.k1) if self.args.k1 else None,
            )
            passed = report.passed
        else:
            report = self.verify_onedim()
            passed = report.passed
        self._write(report)
        if not passed:
            logger.error(f"verify {subject} failed")
            return EXIT_NUMERIC
        return EXIT_OK

    def verify_proposition(self) -> VerificationReport:
        args = self.args
        key = ceiling_key(args.subject, args.N, args.k2, args.seed)
        ceiling = self._ceiling(key)
        points = generate_points(
            args.N,
            args.points if args.points is not None else 25,
            args.seed,
            box=args.box if args.box is not None else DEFAULT_POINT_BOX,
            max_norm_product=args.max_norm_product,
            small_fraction=args.small_fraction,
        )
        config = SweepConfig(
            subject=args.subject,
            N=args.N,
            k2=args.k2,
            mu_grid=self._mu_grid(DEFAULT_MU_GRID),
            point_grid=points,
            policy=self.policy,
            seed=args.seed,
            ceiling=ceiling,
        )
        report = VerificationHarness(args.workers).run(config)
        report.inputs.update({
            "box": args.box if args.box is not None else DEFAULT_POINT_BOX,
            "max_norm_product": args.max_norm_product,
            "small_fraction": args.small_fraction,
        })
        self._mint(key, report.empirical_constant, ceiling, report.passed)
        return report

    def verify_onedim(self) -> CheckReport:
        key = ceiling_key("onedim", 1, 0.0, self.args.seed)
        xs = default_onedim_grid(self.args.points if self.args.points is not None else 200)
        ceiling = self._ceiling(key)
        report = onedim_sweep(self._mu_grid(DEFAULT_ONEDIM_MU_GRID), xs, ceiling)
        self._mint(key, report.summary["max_sup_ratio"], ceiling, report.passed)
        return report


def _records_csv(report: BaseModel) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if isinstance(report, VerificationReport):
        writer.writerow(["mu", "x", "y", "error", "denominator", "ratio"])
        for r in report.records:
            writer.writerow([
                repr(r.mu),
                ",".join(repr(v) for v in r.point.x),
                ",".join(repr(v) for v in r.point.y),
                repr(r.error),
                repr(r.denominator),
                repr(r.ratio),
            ])
    else:
        records = report.records
        if records:
            writer.writerow(list(records[0].keys()))
            for r in records:
                writer.writerow([_csv_cell(v) for v in r.values()])
    return buffer.getvalue()


def _csv_cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ""
    return str(value)


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None) -> int:
    """Entry point; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.debug)
    try:
        runner = CommandRunner(args, stdout or sys.stdout)
        return runner.run()
    except DomainError as e:
        logger.error(f"Domain error: {e}")
        return EXIT_USAGE
    except (DunklError, ArithmeticError) as e:
        logger.error(f"Numeric error: {e}")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
