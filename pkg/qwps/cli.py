"""Command-line front end."""
import argparse
import csv
import json
import sys
from typing import Any, Sequence

from qwps import common, logging_conf
from qwps.base import AsyncTaskRunner
from qwps.connection import idempotent_report, nontriviality_certificate, strong_connection
from qwps.fredholm import pairing_table
from qwps.models import (
    ArithmeticCapacityError,
    CoefficientSource,
    CommutatorProfile,
    FredholmLabel,
    OutputFormat,
    PreconditionError,
    QwpsError,
    RunConfig,
    VerificationError,
)
from qwps.ncalgebra import generation_test, run_relation_suite, xi
from qwps.representations import numeric_relation_suite
from qwps.spectral import (
    commutator_profile,
    lambda_samples,
    lipschitz_norm,
    spectrum_rows,
    zeta_partial,
)
from qwps.weights import as_pairwise_coprime, classify, sharp

LOGGER = logging_conf.LOGGER

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PRECONDITION = 2
EXIT_VERIFICATION = 3

CSV_COLUMNS = ("h", "r", "m", "alpha", "formula", "oracle", "tail", "agrees")


class UsageError(QwpsError):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """Raises instead of exiting so main() controls the exit code."""

    def error(self, message: str) -> None:
        raise UsageError(message)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="qwps",
        description="Quantum weighted projective spaces: classification, "
        + "relations, pairings, connections and spectra.",
    )
    parser.add_argument("--q", help="deformation parameter, e.g. 0.5 or 1/2")
    parser.add_argument("--cutoff", type=int, help="lattice truncation")
    parser.add_argument("--max-cutoff", type=int, help="largest automatic cutoff")
    parser.add_argument(
        "--format", choices=[value.value for value in OutputFormat],
        help="output format",
    )
    parser.add_argument("--output", help="write the result to this file")
    parser.add_argument("--threads", type=int, help="parallelism cap")
    commands = parser.add_subparsers(dest="command", required=True)

    classify_parser = commands.add_parser("classify", help="classify a weight vector")
    classify_parser.add_argument("weights", nargs="+")

    generators_parser = commands.add_parser(
        "generators", help="test generation by the xi_{i,j}"
    )
    generators_parser.add_argument("weights", nargs="+")

    relations_parser = commands.add_parser("relations", help="run the relation suite")
    relations_parser.add_argument("p", nargs="+")
    mode = relations_parser.add_mutually_exclusive_group()
    mode.add_argument("--symbolic", action="store_true", default=True)
    mode.add_argument("--numeric", action="store_true")
    relations_parser.add_argument("--max-power", type=int, default=4)

    pairing_parser = commands.add_parser("pairing", help="pairing table")
    pairing_parser.add_argument("p", nargs="+")
    pairing_parser.add_argument("--grid", default=None, help="h,m,alpha_max")

    connection_parser = commands.add_parser(
        "connection", help="strong connection and idempotent"
    )
    connection_parser.add_argument("p", nargs="+")
    connection_parser.add_argument("--k", type=int, default=1)
    connection_parser.add_argument(
        "--source", choices=[value.value for value in CoefficientSource],
        default=CoefficientSource.RECURSION.value,
    )

    spectrum_parser = commands.add_parser("spectrum", help="Dirac spectrum diagnostics")
    spectrum_parser.add_argument("n", type=int)
    spectrum_parser.add_argument("--lambda", dest="lam", default="identity")
    spectrum_parser.add_argument("--s", type=float, default=None)
    spectrum_parser.add_argument("--terms", type=int, default=256)
    spectrum_parser.add_argument("--weights", nargs="+", default=None)
    spectrum_parser.add_argument("--profile-cutoffs", default="8,12,16")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    return common.load_run_config(
        q=common.parse_q(args.q) if args.q else None,
        cutoff=args.cutoff,
        max_cutoff=args.max_cutoff,
        output_format=OutputFormat(args.format) if args.format else None,
        output=args.output,
        threads=args.threads,
    )


def _classify(args: argparse.Namespace, config: RunConfig) -> tuple[Any, bool]:
    report = classify(common.parse_weights(args.weights))
    return report.model_dump(mode="json"), True


def _generators(args: argparse.Namespace, config: RunConfig) -> tuple[Any, bool]:
    verdict = generation_test(common.parse_weights(args.weights))
    return verdict.model_dump(mode="json"), True


def _relations(args: argparse.Namespace, config: RunConfig) -> tuple[Any, bool]:
    p = as_pairwise_coprime(common.parse_weights(args.p))
    if args.numeric:
        results = numeric_relation_suite(
            p, config.q, config.cutoff, config.tolerance_relations, args.max_power
        )
    else:
        results = run_relation_suite(p, args.max_power)
    rows = [result.model_dump(mode="json") for result in results]
    return rows, all(result.holds for result in results)


def _pairing(args: argparse.Namespace, config: RunConfig) -> tuple[Any, bool]:
    p = as_pairwise_coprime(common.parse_weights(args.p))
    grid = common.parse_grid(args.grid) if args.grid else (p.n, p.n, 4)
    reports = pairing_table(p, grid, config)
    return reports, all(report.agrees for report in reports)


def _connection(args: argparse.Namespace, config: RunConfig) -> tuple[Any, bool]:
    p = as_pairwise_coprime(common.parse_weights(args.p))
    source = CoefficientSource(args.source)
    connection = strong_connection(args.k, p, source)
    payload: dict[str, Any] = {
        "p": list(p.entries),
        "k": args.k,
        "terms": [
            {"left": left.to_text(), "right": right.to_text()}
            for left, right in connection.pairs
        ],
        "unmerged_size": connection.unmerged_size,
    }
    report = idempotent_report(args.k, p, source, with_entries=True)
    payload["idempotent"] = report.model_dump(mode="json")
    certificate = nontriviality_certificate(
        p, config.q, config.cutoff, config.max_cutoff, source
    )
    payload["pairings"] = certificate.model_dump(mode="json")
    return payload, certificate.nontrivial


def _spectrum(args: argparse.Namespace, config: RunConfig) -> tuple[Any, bool]:
    spec = common.parse_lambda(args.lam, args.n, config.cutoff)
    terms = args.terms
    if spec.samples is not None:
        # custom lambda is only known on its samples
        upto = len(spec.samples) - 1
        spec = spec.model_copy(update={"cutoff": max(1, min(config.cutoff, upto))})
        terms = min(terms, upto)
    payload: dict[str, Any] = {
        "n": args.n,
        "lambda": spec.lambda_kind.value,
        "spectrum": spectrum_rows(spec),
        "lipschitz": lipschitz_norm(lambda_samples(spec, spec.cutoff)),
    }
    s = args.s if args.s is not None else args.n + 1.0
    payload["zeta"] = zeta_partial(spec, s, terms).model_dump(mode="json")
    ok = all(row["multiplicity"] == row["enumerated"] for row in payload["spectrum"])
    if args.weights:
        p = as_pairwise_coprime(common.parse_weights(args.weights))
        if p.n != args.n:
            raise PreconditionError(f"Weights {p} do not match n={args.n}.")
        cutoffs = [int(value) for value in args.profile_cutoffs.split(",")]
        label = FredholmLabel(h=p.n, r=(0,) * p.n)
        weights = sharp(p)
        pairs = [
            (i, j) for i in range(p.n + 1) for j in range(p.n + 1) if i != j
        ]

        def profile_of(pair: tuple[int, int]) -> CommutatorProfile:
            return commutator_profile(
                xi(*pair, weights), spec, label, p, config.q, cutoffs
            )

        profiles = AsyncTaskRunner(config.threads).map(profile_of, pairs)
        ok = ok and all(profile.bounded is not False for profile in profiles)
        payload["profiles"] = [
            profile.model_dump(mode="json") for profile in profiles
        ]
    return payload, ok


HANDLERS = {
    "classify": _classify,
    "generators": _generators,
    "relations": _relations,
    "pairing": _pairing,
    "connection": _connection,
    "spectrum": _spectrum,
}


def _render_text(payload: Any) -> str:
    if isinstance(payload, list):
        return "\n".join(_render_text(item) for item in payload)
    if hasattr(payload, "model_dump"):
        payload = payload.model_dump(mode="json")
    if isinstance(payload, dict):
        return "\n".join(
            f"{key}: {json.dumps(value, ensure_ascii=False)}"
            for key, value in payload.items()
        )
    return str(payload)


def _emit(command: str, payload: Any, config: RunConfig) -> None:
    output_format = config.output_format
    if command == "pairing" and output_format == OutputFormat.CSV:
        rows = [report.csv_row() for report in payload]
        if config.output:
            common.save_csv(rows, config.output)
            return
        writer = csv.DictWriter(sys.stdout, fieldnames=CSV_COLUMNS, quoting=csv.QUOTE_ALL)
        writer.writeheader()
        writer.writerows(rows)
        return
    if command == "pairing":
        payload = [report.model_dump(mode="json") for report in payload]
        if output_format == OutputFormat.JSON and config.output:
            common.save_jsonl(payload, config.output)
            return
    match output_format:
        case OutputFormat.JSON:
            document = common.with_schema(payload)
            if config.output:
                common.save_json(document, config.output)
            else:
                print(json.dumps(document, indent=4, ensure_ascii=False))
        case OutputFormat.CSV:
            rows = payload if isinstance(payload, list) else [payload]
            rows = [
                {key: json.dumps(value) if isinstance(value, (list, dict)) else value
                 for key, value in row.items()}
                for row in rows
            ]
            if config.output:
                common.save_csv(rows, config.output)
            elif rows:
                writer = csv.DictWriter(
                    sys.stdout, fieldnames=list(rows[0]), quoting=csv.QUOTE_ALL
                )
                writer.writeheader()
                writer.writerows(rows)
        case _:
            text = _render_text(payload)
            if config.output:
                with open(config.output, mode="w", encoding="utf-8") as outfile:
                    outfile.write(text + "\n")
            else:
                print(text)


def main(argv: Sequence[str] | None = None) -> int:
    """
    Runs one subcommand.

    Returns:
        int: 0 on success, 1 on usage errors, 2 on precondition errors, \
            3 when a verification or check fails.
    """
    try:
        args = build_parser().parse_args(argv)
        config = _config(args)
        LOGGER.debug(f"Running {args.command} with {config.model_dump()}")
        payload, ok = HANDLERS[args.command](args, config)
        _emit(args.command, payload, config)
    except UsageError as e:
        LOGGER.error(f"Usage: {e}")
        return EXIT_USAGE
    except (PreconditionError, ArithmeticCapacityError) as e:
        LOGGER.error(f"Precondition failed: {e}")
        return EXIT_PRECONDITION
    except VerificationError as e:
        LOGGER.error(f"Verification failed: {e}")
        return EXIT_VERIFICATION
    if not ok:
        LOGGER.warning(f"Checks of '{args.command}' did not all pass")
        return EXIT_VERIFICATION
    return EXIT_OK
