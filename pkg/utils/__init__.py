# utils/__init__.py
from .decorators import json_body_required, int_param
from .exceptions import (
    AppException,
    ValidationError,
    NotFoundError,
    PreconditionError,
    CountMismatchError,
    WindowTooShortError,
    BudgetExceededError,
    PropertyViolation,
    VershikOverflowError
)
from .serializers import load_json, load_model, dump_json, dump_csv, read_growth_table

__all__ = [
    'json_body_required',
    'int_param',
    'AppException',
    'ValidationError',
    'NotFoundError',
    'PreconditionError',
    'CountMismatchError',
    'WindowTooShortError',
    'BudgetExceededError',
    'PropertyViolation',
    'VershikOverflowError',
    'load_json',
    'load_model',
    'dump_json',
    'dump_csv',
    'read_growth_table'
]
