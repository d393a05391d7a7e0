from datetime import datetime
import logging
import os
import sys
from typing import Optional

from modules.util.singleton import Singleton


class Logger(metaclass=Singleton):
    """
    Singleton class that creates a logger object that logs to the console and, optionally, to a file.
    """

    def __init__(self, dir: Optional[str] = None, debug: bool = False, is_silent: bool = False):
        if dir is not None and not isinstance(dir, str):
            raise TypeError("the directory must be a string.")

        self.logger = logging.getLogger("hybrid-loc")
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False

        # Remove any previous handlers
        self.logger.handlers.clear()

        formatter = logging.Formatter("%(asctime)s - %(levelname)s - %(message)s")

        # Console handler writes to stderr so that result files piped to stdout stay clean
        ch = logging.StreamHandler(sys.stderr)
        if debug:
            ch.setLevel(logging.DEBUG)
        elif is_silent:
            ch.setLevel(logging.ERROR)
        else:
            ch.setLevel(logging.INFO)
        ch.setFormatter(formatter)
        self.logger.addHandler(ch)

        if dir is not None:
            # Generate a filename using basename+timestamp
            timestamp = datetime.now().strftime("%Y%m%d%H%M%S")
            os.makedirs(dir, exist_ok=True)
            filename = os.path.join(dir, f"localize_{timestamp}.log")

            # The file receives everything, regardless of the console level
            fh = logging.FileHandler(filename)
            fh.setLevel(logging.DEBUG)
            fh.setFormatter(formatter)
            self.logger.addHandler(fh)

    def debug(self, message: str):
        self.logger.debug(message)

    def info(self, message: str):
        self.logger.info(message)

    def warning(self, message: str):
        self.logger.warning(message)

    def error(self, message: str):
        self.logger.error(message)

    def fatal(self, message: str, code: int = 1):
        self.logger.fatal(message)
        sys.exit(code)
