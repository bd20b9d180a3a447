import json
import unittest

import pytest

from qwps import common
from qwps.common import (
    get_boolean_from_environment_string,
    get_max_bits,
    get_threads,
    load_run_config,
    parse_grid,
    parse_lambda,
    parse_q,
    parse_weights,
    parse_word,
    save_json,
    save_jsonl,
    validate_token,
    with_schema,
)
from qwps.models import (
    LambdaKind,
    OutputFormat,
    PreconditionError,
    TokenPattern,
)


class TestValidateToken(unittest.TestCase):
    def test_validate_token_with_valid_input(self):
        validate_token("1 2 2", TokenPattern.WEIGHTS)

    def test_validate_token_with_invalid_input(self):
        with self.assertRaises(PreconditionError):
            validate_token("1 two", TokenPattern.WEIGHTS)

    def test_validate_token_with_none(self):
        with self.assertRaises(TypeError):
            validate_token(None, TokenPattern.WEIGHTS)

    def test_validate_token_with_int(self):
        with self.assertRaises(TypeError):
            validate_token(123, TokenPattern.Q)


class TestParseWeights(unittest.TestCase):
    def test_parse_weights_with_whitespace(self):
        self.assertEqual((1, 2, 2), parse_weights("1 2 2"))

    def test_parse_weights_with_commas(self):
        self.assertEqual((2, 3, 5), parse_weights("2, 3,5"))

    def test_parse_weights_with_list(self):
        self.assertEqual((1, 12), parse_weights(["1", "12"]))

    def test_parse_weights_with_zero(self):
        with self.assertRaises(PreconditionError):
            parse_weights("1 0 2")

    def test_parse_weights_with_single_weight(self):
        with self.assertRaises(PreconditionError):
            parse_weights("3")


class TestParseWord(unittest.TestCase):
    def test_parse_word_with_powers(self):
        self.assertEqual(
            [(0, False), (1, True), (1, True)], parse_word("z0 z1*^2")
        )

    def test_parse_word_with_empty_string(self):
        self.assertEqual([], parse_word(""))

    def test_parse_word_with_invalid_letter(self):
        with self.assertRaises(PreconditionError):
            parse_word("y0")


class TestParseScalars(unittest.TestCase):
    def test_parse_q_decimal_and_fraction(self):
        self.assertEqual(0.5, parse_q("0.5"))
        self.assertEqual(0.25, parse_q("1/4"))
        self.assertEqual(0.5, parse_q(".5"))

    def test_parse_q_with_invalid_input(self):
        with self.assertRaises(PreconditionError):
            parse_q("half")

    def test_parse_grid(self):
        self.assertEqual((2, 1, 4), parse_grid("2,1,4"))
        with self.assertRaises(PreconditionError):
            parse_grid("2,1")

    def test_parse_lambda(self):
        self.assertEqual(LambdaKind.IDENTITY, parse_lambda("identity", 2).lambda_kind)
        power = parse_lambda("power:1.5", 3)
        self.assertEqual((LambdaKind.POWER, 1.5), (power.lambda_kind, power.d))
        custom = parse_lambda("custom:0,1,4", 1, cutoff=2)
        self.assertEqual((0.0, 1.0, 4.0), custom.samples)

    def test_parse_lambda_with_invalid_samples(self):
        with self.assertRaises(PreconditionError):
            parse_lambda("custom:3,1", 1)
        with self.assertRaises(PreconditionError):
            parse_lambda("cubic", 1)


def test_get_boolean_from_environment_string(monkeypatch):
    monkeypatch.setenv("QWPS_SEARCH_ALL_PATHS", "true")
    assert get_boolean_from_environment_string("QWPS_SEARCH_ALL_PATHS")
    monkeypatch.setenv("QWPS_SEARCH_ALL_PATHS", "no")
    assert not get_boolean_from_environment_string("QWPS_SEARCH_ALL_PATHS")
    monkeypatch.delenv("QWPS_SEARCH_ALL_PATHS")
    assert get_boolean_from_environment_string("QWPS_SEARCH_ALL_PATHS", "True")


def test_get_threads(monkeypatch):
    monkeypatch.delenv("QWPS_THREADS", raising=False)
    assert get_threads() == 4
    monkeypatch.setenv("QWPS_THREADS", "7")
    assert get_threads() == 7


def test_get_max_bits(monkeypatch):
    monkeypatch.delenv("QWPS_MAX_BITS", raising=False)
    assert get_max_bits() == 4096
    monkeypatch.setenv("QWPS_MAX_BITS", "64")
    assert get_max_bits() == 64


@pytest.fixture
def clean_environment(monkeypatch, mocker):
    mocker.patch("qwps.common.load_environment_variables")
    for name in (
        "QWPS_Q", "QWPS_CUTOFF", "QWPS_MAX_CUTOFF", "QWPS_TOL_RELATIONS",
        "QWPS_TOL_TRACES", "QWPS_OUTPUT_FORMAT", "QWPS_THREADS", "QWPS_OUTPUT",
    ):
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


def test_load_run_config_defaults(clean_environment):
    config = load_run_config()
    assert config.q == 0.5
    assert config.cutoff == 12
    assert config.output_format == OutputFormat.TEXT


def test_load_run_config_from_environment(clean_environment):
    clean_environment.setenv("QWPS_Q", "1/3")
    clean_environment.setenv("QWPS_CUTOFF", "20")
    clean_environment.setenv("QWPS_OUTPUT_FORMAT", "csv")
    config = load_run_config()
    assert config.q == pytest.approx(1 / 3)
    assert config.cutoff == 20
    assert config.max_cutoff == 80
    assert config.output_format == OutputFormat.CSV


def test_load_run_config_overrides_win(clean_environment):
    clean_environment.setenv("QWPS_CUTOFF", "20")
    config = load_run_config(cutoff=100, threads=None)
    assert config.cutoff == 100
    assert config.max_cutoff == 100
    assert config.threads == 4


def test_load_run_config_rejects_invalid(clean_environment):
    with pytest.raises(PreconditionError):
        load_run_config(cutoff=2)
    with pytest.raises(PreconditionError):
        load_run_config(cutoff=30, max_cutoff=20)


def test_with_schema():
    assert with_schema({"a": 1}) == {"schema": "qwps/1", "a": 1}
    assert with_schema([1, 2]) == {"schema": "qwps/1", "data": [1, 2]}


def test_save_json(tmp_path):
    filename = tmp_path / "out.json"
    save_json(with_schema({"value": -1}), str(filename))
    with open(filename, encoding="utf-8") as infile:
        assert json.load(infile) == {"schema": common.SCHEMA, "value": -1}


def test_save_jsonl(tmp_path):
    filename = tmp_path / "out.jsonl"
    save_jsonl([{"h": 1}, {"h": 2}], str(filename))
    with open(filename, encoding="utf-8") as infile:
        lines = [json.loads(line) for line in infile]
    assert [line["h"] for line in lines] == [1, 2]
    assert all(line["schema"] == common.SCHEMA for line in lines)
