"""
Exception hierarchy for the bipolar community detection toolkit
"""


class ToolkitError(Exception):
    """Base class for every error raised by the toolkit"""

    exit_code = 1
    error_type = "toolkit"


class InputError(ToolkitError, ValueError):
    """Invalid input: files, dimensions, labels, measures or operator specs"""

    exit_code = 2
    error_type = "input"


class NumericError(ToolkitError, ArithmeticError):
    """Numerically undefined request, e.g. zero total weight"""

    exit_code = 3
    error_type = "numeric"
