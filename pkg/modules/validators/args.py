import argparse
import os
from fractions import Fraction


class ValidateDirectoryPath(argparse.Action):
    """
    This class is used by argparse to validate the output or log directory passed as an argument by the user.
    """

    def __call__(self, parser, namespace, values, option_string=None) -> None:
        path = values
        # Convert the path to a string
        if not isinstance(path, str):
            path = str(path)
        # Check for null value or empty string
        if not path:
            raise ValueError("The directory path cannot be empty.")
        if os.path.exists(path) and not os.path.isdir(path):
            raise ValueError(f"{path} exists and is not a directory.")
        # Check if directory exists
        if not os.path.isdir(path):
            # Try to create the directory
            try:
                os.makedirs(path)
            except PermissionError:
                raise ValueError(f"The directory {path} does not exist and cannot be created.")

        # Set the path to the directory
        setattr(namespace, self.dest, path)


def _check_readable(path: str, extensions: tuple[str, ...], kind: str) -> str:
    if not isinstance(path, str):
        path = str(path)
    if not path:
        raise ValueError("The file path cannot be empty.")
    if not path.endswith(extensions):
        raise ValueError(f"{path} must be a {kind} file ({', '.join(extensions)}).")
    # Check if file exists and is readable
    try:
        with open(path, "r"):
            pass
    except FileNotFoundError:
        raise ValueError(f"The file {path} does not exist.")
    except PermissionError:
        raise ValueError(f"The file {path} is not readable.")
    except IsADirectoryError:
        raise ValueError(f"{path} is a directory.")
    return path


class ValidateYAMLPath(argparse.Action):
    """
    This class is used by argparse to validate the path to the YAML file passed as an argument by the user.
    """

    def __call__(self, parser, namespace, values, option_string=None) -> None:
        setattr(namespace, self.dest, _check_readable(values, (".yaml", ".yml"), "YAML"))


class ValidateCSVPath(argparse.Action):
    """
    This class is used by argparse to validate the path to a CSV input (measurement log, track, polyline).
    """

    def __call__(self, parser, namespace, values, option_string=None) -> None:
        setattr(namespace, self.dest, _check_readable(values, (".csv",), "CSV"))


class ValidatePositiveInt(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None) -> None:
        try:
            value = int(values)
        except (TypeError, ValueError):
            raise ValueError(f"{option_string} expects an integer, got '{values}'.")
        if value < 1:
            raise ValueError(f"{option_string} must be at least 1, got {value}.")
        setattr(namespace, self.dest, value)


class ValidateRateList(argparse.Action):
    """
    Comma-separated list of positive rates in Hz; fractions such as 1/4 are accepted.
    """

    def __call__(self, parser, namespace, values, option_string=None) -> None:
        rates = []
        for raw in str(values).split(","):
            try:
                rate = float(Fraction(raw.strip()))
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"{option_string} expects comma-separated rates, got '{raw}'.")
            if rate <= 0:
                raise ValueError(f"{option_string} rates must be positive, got {raw}.")
            rates.append(rate)
        setattr(namespace, self.dest, tuple(rates))
