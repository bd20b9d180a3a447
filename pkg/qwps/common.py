import regex as re
import csv
import json
import os
from fractions import Fraction
from os.path import join, dirname
from typing import Any
from dotenv import load_dotenv
from pydantic import ValidationError

from qwps import logging_conf
from qwps.models import (
    DiracSpec,
    LambdaKind,
    OutputFormat,
    PreconditionError,
    RunConfig,
    TokenPattern,
)

LOGGER = logging_conf.LOGGER

SCHEMA = "qwps/1"


def validate_token(string: str, type: TokenPattern) -> None:
    """
    Validates the string against the specified TokenPattern.

    Args:
        string (str): The string to validate.
        type (TokenPattern): The token pattern.

    Raises:
        PreconditionError: If the string does not match the pattern.
    """
    if not isinstance(string, str):
        raise TypeError("Expected string as input.")
    if not re.match(type.value, string):
        raise PreconditionError(
            f"Invalid pattern. String '{string}' doesn't match "
            + f"{type.name} format."
        )
    LOGGER.debug(
        f"Valid pattern. String '{string}' matches {type.name} format."
    )


def parse_weights(text: str | list[str]) -> tuple[int, ...]:
    """
    Parses a weight vector from whitespace or comma separated integers.

    Args:
        text (str | list[str]): "1 2 2", "1,2,2" or ["1", "2", "2"].

    Returns:
        tuple[int, ...]: The weights.
    """
    string = " ".join(text) if isinstance(text, list) else text
    validate_token(string, TokenPattern.WEIGHTS)
    return tuple(int(value) for value in re.split(r"[\s,]+", string.strip()))


def parse_word(text: str) -> list[tuple[int, bool]]:
    """
    Parses a word in the sphere generators.

    Args:
        text (str): Letters like "z1", "z0*", "z2^3", "z1*^2".

    Returns:
        list[tuple[int, bool]]: (index, starred) letters in order.
    """
    validate_token(text, TokenPattern.WORD)
    word: list[tuple[int, bool]] = []
    for letter in re.finditer(TokenPattern.WORD_LETTER.value, text):
        power = int(letter.group("power")) if letter.group("power") else 1
        word.extend(
            [(int(letter.group("index")), letter.group("star") is not None)]
            * power
        )
    return word


def parse_q(text: str) -> float:
    """Parses q given as a decimal ("0.5") or a fraction ("1/2")."""
    validate_token(text, TokenPattern.Q)
    return float(Fraction(text))


def parse_grid(text: str) -> tuple[int, int, int]:
    """Parses a pairing grid "h,m,alpha_max"."""
    validate_token(text, TokenPattern.GRID)
    found = re.match(TokenPattern.GRID.value, text)
    return (
        int(found.group("h")),
        int(found.group("m")),
        int(found.group("alpha_max")),
    )


def parse_lambda(text: str, n: int, cutoff: int = 16) -> DiracSpec:
    """
    Parses a lambda description into a DiracSpec.

    Args:
        text (str): "identity", "power:<d>" or "custom:v0,v1,...".
        n (int): Lattice dimension.
        cutoff (int, optional): Spectrum cutoff. Defaults to 16.

    Returns:
        DiracSpec: The validated spec.
    """
    validate_token(text, TokenPattern.LAMBDA)
    found = re.match(TokenPattern.LAMBDA.value, text)
    try:
        if found.group("d"):
            return DiracSpec(
                n=n,
                lambda_kind=LambdaKind.POWER,
                d=float(found.group("d")),
                cutoff=cutoff,
            )
        if found.group("values"):
            return DiracSpec(
                n=n,
                lambda_kind=LambdaKind.CUSTOM,
                samples=tuple(
                    float(value)
                    for value in found.group("values").split(",")
                ),
                cutoff=cutoff,
            )
        return DiracSpec(n=n, cutoff=cutoff)
    except ValidationError as ve:
        raise PreconditionError(f"Invalid lambda '{text}': {ve}") from ve


def load_environment_variables() -> None:
    """
    Loads environment variables from a .env file for configuration.

    The working directory is tried first, then the repository root.
    """
    for dotenv_path in (
        join(os.getcwd(), ".env"),
        join(dirname(__file__), "../.env"),
    ):
        if os.path.isfile(dotenv_path):
            load_dotenv(dotenv_path, override=True)
            LOGGER.debug(f"Using .env file from {dotenv_path}")
            return
    LOGGER.debug("Didn't find a .env file")


def get_boolean_from_environment_string(
    env_str: str, env_str_default: str = "False"
) -> bool:
    """
    Converts the environment variable value to a boolean.

    Args:
        env_str (str): Name of the environment variable.
        env_str_default (str, optional): Default value if not set. \
            Defaults to "False".

    Returns:
        bool: Boolean representation of the variable's value.
    """
    __env_str: str = os.environ.get(env_str, env_str_default)
    if __env_str.lower() == "True".lower():
        return True
    else:
        return False


def get_threads(default: int = 4) -> int:
    """Returns the QWPS_THREADS parallelism cap."""
    return int(os.getenv("QWPS_THREADS")) if os.getenv("QWPS_THREADS") \
        else default


def get_max_bits(default: int = 4096) -> int:
    """Returns the QWPS_MAX_BITS integer capacity."""
    return int(os.getenv("QWPS_MAX_BITS")) if os.getenv("QWPS_MAX_BITS") \
        else default


def load_run_config(**overrides: Any) -> RunConfig:
    """
    Builds the run configuration.

    Explicit overrides win over environment variables, which win over \
        the RunConfig defaults.

    Args:
        **overrides: RunConfig fields; None values are ignored.

    Raises:
        PreconditionError: If the resulting configuration is invalid.

    Returns:
        RunConfig: The validated configuration.
    """
    load_environment_variables()
    values: dict[str, Any] = {}
    environment = {
        "q": ("QWPS_Q", parse_q),
        "cutoff": ("QWPS_CUTOFF", int),
        "max_cutoff": ("QWPS_MAX_CUTOFF", int),
        "tolerance_relations": ("QWPS_TOL_RELATIONS", float),
        "tolerance_traces": ("QWPS_TOL_TRACES", float),
        "output_format": ("QWPS_OUTPUT_FORMAT", OutputFormat),
        "threads": ("QWPS_THREADS", int),
        "output": ("QWPS_OUTPUT", str),
    }
    for field, (env_name, convert) in environment.items():
        if overrides.get(field) is not None:
            values[field] = overrides[field]
        elif os.getenv(env_name):
            values[field] = convert(os.getenv(env_name))
    if "max_cutoff" not in values and "cutoff" in values:
        values["max_cutoff"] = max(80, values["cutoff"])
    try:
        config = RunConfig(**values)
    except (ValidationError, ValueError) as ve:
        raise PreconditionError(f"Invalid configuration: {ve}") from ve
    LOGGER.debug(f"Run configuration: {config.model_dump()}")
    return config


def with_schema(payload: dict | list) -> dict:
    """Wraps a payload with the versioned schema key."""
    if isinstance(payload, dict):
        return {"schema": SCHEMA, **payload}
    return {"schema": SCHEMA, "data": payload}


def save_json(data: dict | list[dict], file: str) -> None:
    """
    Saves data as a JSON file.

    Args:
        data (dict | list[dict]): Data to save.
        file (str): Filename for the JSON output.
    """
    LOGGER.info(f"Saving JSON output to {file}")
    with open(file, mode="w", newline="", encoding="utf-8") as outfile:
        outfile.write(json.dumps(data, indent=4, ensure_ascii=False))


def save_jsonl(data: list[dict], file: str) -> None:
    """
    Saves records as JSON lines, one object per line.

    Args:
        data (list[dict]): Records to save.
        file (str): Filename for the JSON lines output.
    """
    LOGGER.info(f"Saving JSON lines output to {file}")
    with open(file, mode="w", newline="", encoding="utf-8") as outfile:
        for record in data:
            outfile.write(
                json.dumps(with_schema(record), ensure_ascii=False) + "\n"
            )


def save_csv(data: list[dict], file: str) -> None:
    """
    Saves data as a CSV file.

    Args:
        data (list[dict]): Data to save.
        file (str): Filename for the CSV output.

    Raises:
        FileNotFoundError: If there is nothing to save.
    """
    if not data:
        raise FileNotFoundError(f"No rows to save into {file}")
    LOGGER.info(f"Saving CSV output to {file}")
    with open(file, mode="w", newline="", encoding="utf-8") as file:
        fieldnames = list(data[0].keys())
        writer = csv.DictWriter(
            file, fieldnames=fieldnames, quoting=csv.QUOTE_ALL
        )

        writer.writeheader()
        writer.writerows(data)
