import sys
from time import perf_counter

from qwps import cli, logging_conf

LOGGER = logging_conf.setup_logger(__name__)


def main() -> int:
    """
    Runs the qwps command line with the arguments given to this script.

    Examples:
        python run.py classify 2 6 3
        python run.py --format json pairing 1 2 --grid 2,2,3
    """
    return cli.main(sys.argv[1:])


if __name__ == "__main__":
    start_time = perf_counter()
    code = main()
    LOGGER.info(f"Total time: {(perf_counter() - start_time):.2f} seconds.")
    sys.exit(code)
