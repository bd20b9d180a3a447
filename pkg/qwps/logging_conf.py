import logging
import os


def setup_logger(name: str = __name__) -> logging.Logger:
    """
    Setup INFO logging to the console and DEBUG logging to a file.

    The file defaults to "debug.log" and can be moved with the \
        QWPS_LOG_FILE environment variable. Handlers are attached only \
            once per logger name.
    """
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)
    if logger.handlers:
        return logger

    log_format_info = logging.Formatter(
        "%(asctime)s [%(levelname)s] %(message)s"
    )
    stream_handler = logging.StreamHandler()
    stream_handler.setFormatter(log_format_info)
    stream_handler.setLevel(logging.INFO)
    logger.addHandler(stream_handler)

    log_file = os.getenv("QWPS_LOG_FILE") if os.getenv("QWPS_LOG_FILE") \
        else "debug.log"
    file_handler = logging.FileHandler(filename=log_file, mode="w")
    file_handler.setFormatter(log_format_info)
    file_handler.setLevel(logging.DEBUG)
    logger.addHandler(file_handler)

    return logger


LOGGER = setup_logger(__name__)
