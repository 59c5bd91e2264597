# utils/decorators.py
from functools import wraps

from flask import request

from utils.exceptions import ValidationError


def json_body_required(*fields):
    """
    Decorator for API routes taking a JSON object body.
    Usage: @json_body_required('diagram', 'k')
    """
    def decorator(f):
        @wraps(f)
        def decorated_function(*args, **kwargs):
            data = request.get_json(silent=True)
            if not isinstance(data, dict):
                raise ValidationError('Request body must be a JSON object.', field='body')
            missing = [name for name in fields if name not in data]
            if missing:
                raise ValidationError(f"Missing fields: {', '.join(missing)}.", field='body', errors=missing)
            return f(data, *args, **kwargs)
        return decorated_function
    return decorator


def int_param(data, name, default=None, minimum=1):
    """Integer field of a request body, at least ``minimum``."""
    value = data.get(name, default)
    if value is None:
        raise ValidationError(f"Field '{name}' is required.", field=name)
    try:
        value = int(value)
    except (TypeError, ValueError):
        raise ValidationError(f"Field '{name}' must be an integer.", field=name)
    if value < minimum:
        raise ValidationError(f"Field '{name}' must be at least {minimum}.", field=name)
    return value
