import pytest
import csv
from qwps import common
from qwps.common import save_csv


@pytest.fixture
def data():
    return [{"h": 1, "r": "0", "formula": -1, "agrees": True}]


def test_save_csv_success(data, tmp_path, mocker):
    filename = tmp_path / "test.csv"
    mock_info = mocker.patch.object(common.LOGGER, "info")

    save_csv(data, str(filename))

    mock_info.assert_called_once_with(f"Saving CSV output to {filename}")
    with open(filename, "r", newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        assert next(reader) == list(data[0].keys())
        assert list(reader) == [["1", "0", "-1", "True"]]


def test_save_csv_quotes_everything(data, tmp_path):
    filename = tmp_path / "test.csv"
    save_csv(data, str(filename))
    with open(filename, encoding="utf-8") as f:
        assert f.readline().strip() == '"h","r","formula","agrees"'


def test_save_csv_empty_data(tmp_path):
    filename = tmp_path / "test.csv"

    with pytest.raises(FileNotFoundError):
        save_csv([], str(filename))


def test_save_csv_exception(tmp_path, mocker):
    mocker.patch("csv.DictWriter", side_effect=Exception("Write error"))
    data = [{"h": 1, "formula": -1}]
    filename = tmp_path / "test.csv"

    with pytest.raises(Exception):
        save_csv(data, str(filename))
