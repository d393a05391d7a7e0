# Significant digits of every number written to a CSV file
SIGNIFICANT_DIGITS = 9


def format_number(value: float) -> str:
    return format(float(value), f".{SIGNIFICANT_DIGITS}g")


def canonical(value: float) -> float:
    """
    The value as it reads back from a CSV file written by this package.
    """
    return float(format_number(value))
