import sys

from fractions import Fraction
from typing import Any, Union

from colorama import Fore, Style

Number = Union[Fraction, float]


class InputError(ValueError):
    """Raised when an argument violates a documented precondition"""


class InvariantViolation(AssertionError):
    """Raised when a computed report breaks one of its invariants"""


def print_error(err_str="", kind="INPUT ERROR"):
    print(f"{Fore.RED}{kind}: {err_str}{Style.RESET_ALL}", file=sys.stderr)


def print_warning(warn_str=""):
    print(f"{Fore.YELLOW}WARNING: {warn_str}{Style.RESET_ALL}", file=sys.stderr)


def print_info(info_str=""):
    print(f"{Fore.GREEN}{info_str}{Style.RESET_ALL}", file=sys.stderr)


def parse_number(value: Any) -> Number:
    """Strings ("1/2", "0.25", "3") and ints become exact Fractions,
    floats stay floats"""
    if isinstance(value, bool):
        raise InputError(f"expected a number, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        text = value.strip()
        if text in ("-inf", "-infinity"):
            return float("-inf")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"'{value}' is not a rational literal") from None
    raise InputError(f"expected a number, got {value!r}")


def is_exact(value: Any) -> bool:
    return isinstance(value, (Fraction, int)) and not isinstance(value, bool)


def format_number(value: Any):
    """JSON-friendly form: "p/q" for Fractions, plain floats otherwise"""
    if value is None:
        return None
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    return float(value)


def parse_int_list(text: str):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"'{text}' is not a comma-separated list of integers") from None
