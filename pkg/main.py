#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import argparse
import logging
import sys

from cmdp_core.types import RejectedInputError
from constants import EVAL_EPISODES, EXIT_NUMERICAL_ABORT, EXIT_OK, EXIT_VERIFY_FAILED
from harness.checkpoint import CheckpointMismatchError
from harness.config import load_config, parse_overrides
from harness.evaluate import evaluate
from harness.format import format_eval_report, format_sweep, format_train_result, format_verification, wrap
from harness.sweep import parse_values, run_sweep
from harness.train import train
from harness.verify import verify

log = logging.getLogger(__name__)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Off-policy TRC: entrenamiento, evaluación y verificación.")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="entrena una política (admite --clave valor extra)")
    p_train.add_argument("--config", default=None, help="fichero key=value")

    p_eval = sub.add_parser("eval", help="evalúa un checkpoint")
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--env", default=None, help="id del entorno (por defecto el del checkpoint)")
    p_eval.add_argument("--episodes", type=int, default=EVAL_EPISODES)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--stochastic", action="store_true", help="muestrear acciones en vez de la media")

    p_verify = sub.add_parser("verify", help="suite del oráculo tabular")
    p_verify.add_argument("--instances", type=int, default=500)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--out", default=None, help="directorio para verification.csv")

    p_sweep = sub.add_parser("sweep", help="una ejecución por valor del parámetro")
    p_sweep.add_argument("--param", required=True, choices=["batch", "collect", "replay", "alpha"])
    p_sweep.add_argument("--values", default=None, help="lista separada por comas; por defecto los presets")
    p_sweep.add_argument("--config", default=None)
    return parser


def main(argv=None) -> int:
    """
    CLI de off-policy TRC
    :return: 0 si todo es correcto, 2 si falla la verificación, 3 si el entrenamiento aborta por NaN/inf
    """
    parser = _build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s:%(name)s:%(message)s")

    if extra and args.command not in ("train", "sweep"):
        parser.error(f"unrecognized arguments: {' '.join(extra)}")

    try:
        if args.command == "train":
            cfg = load_config(args.config, parse_overrides(extra))
            res = train(cfg)
            print(wrap(format_train_result(res)))
            return EXIT_NUMERICAL_ABORT if res.aborted else EXIT_OK

        if args.command == "eval":
            rep = evaluate(args.checkpoint, args.env, args.episodes, seed=args.seed, stochastic=args.stochastic)
            print(wrap(format_eval_report(rep)))
            return EXIT_OK

        if args.command == "verify":
            rep = verify(args.instances, args.seed, out_dir=args.out)
            print(wrap(format_verification(rep)))
            return EXIT_OK if rep.passed else EXIT_VERIFY_FAILED

        if args.command == "sweep":
            base = load_config(args.config, parse_overrides(extra))
            df = run_sweep(base, args.param, parse_values(args.param, args.values))
            print(wrap(format_sweep(df)))
            return EXIT_NUMERICAL_ABORT if df["aborted"].any() else EXIT_OK
    except (RejectedInputError, CheckpointMismatchError, FileNotFoundError) as e:
        log.error("%s", e)
        return 1

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
