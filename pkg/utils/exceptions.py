# utils/exceptions.py
from flask import jsonify


class AppException(Exception):
    """Base exception for the application"""

    exit_code = 2

    def __init__(self, message, status_code=400, payload=None):
        super().__init__(message)
        self.message = message
        self.status_code = status_code
        self.payload = payload

    def to_dict(self):
        rv = dict(self.payload or ())
        rv['success'] = False
        rv['error'] = self.__class__.__name__
        rv['message'] = self.message
        return rv

    def to_response(self):
        response = jsonify(self.to_dict())
        response.status_code = self.status_code
        return response


class ValidationError(AppException):
    """Malformed input: bad JSON, wrong shapes, letters out of range"""

    def __init__(self, message, field=None, errors=None):
        super().__init__(message, status_code=400)
        self.field = field
        self.errors = errors or []

    def to_dict(self):
        rv = super().to_dict()
        if self.field:
            rv['field'] = self.field
        if self.errors:
            rv['errors'] = self.errors
        return rv


class NotFoundError(AppException):
    """Exception raised when a demo or input file is not found"""

    def __init__(self, message="Resource not found.", resource_type=None, resource_id=None):
        super().__init__(message, status_code=404)
        self.resource_type = resource_type
        self.resource_id = resource_id

    def to_dict(self):
        rv = super().to_dict()
        if self.resource_type:
            rv['resource_type'] = self.resource_type
        if self.resource_id:
            rv['resource_id'] = self.resource_id
        return rv


class PreconditionError(AppException):
    """A construction was asked to run on input it does not accept"""

    def __init__(self, message, rule=None, level=None, vertex=None):
        super().__init__(message, status_code=422)
        self.rule = rule
        self.level = level
        self.vertex = vertex

    def to_dict(self):
        rv = super().to_dict()
        if self.rule:
            rv['rule'] = self.rule
        if self.level is not None:
            rv['level'] = self.level
        if self.vertex is not None:
            rv['vertex'] = self.vertex
        return rv


class CountMismatchError(PreconditionError):
    """Order words whose letter counts disagree with the incidence matrix"""

    def __init__(self, message, level=None, vertex=None, letter=None, expected=None, found=None):
        super().__init__(message, rule='order_word_counts', level=level, vertex=vertex)
        self.letter = letter
        self.expected = expected
        self.found = found

    def to_dict(self):
        rv = super().to_dict()
        if self.letter is not None:
            rv['letter'] = self.letter
        if self.expected is not None:
            rv['expected'] = self.expected
        if self.found is not None:
            rv['found'] = self.found
        return rv


class WindowTooShortError(PreconditionError):
    """The directive sequence or diagram ends before the requested depth"""

    def __init__(self, message, level=None, required=None):
        super().__init__(message, rule='window_too_short', level=level)
        self.required = required

    def to_dict(self):
        rv = super().to_dict()
        if self.required is not None:
            rv['required'] = self.required
        return rv


class BudgetExceededError(PreconditionError):
    """A configured search cap or length guard was hit"""

    def __init__(self, message, rule='budget_exceeded', level=None, limit=None):
        super().__init__(message, rule=rule, level=level)
        self.limit = limit

    def to_dict(self):
        rv = super().to_dict()
        if self.limit is not None:
            rv['limit'] = self.limit
        return rv


class PropertyViolation(AppException):
    """A property check or audit failed"""

    exit_code = 1

    def __init__(self, message, clause=None, level=None, letter=None):
        super().__init__(message, status_code=422)
        self.clause = clause
        self.level = level
        self.letter = letter

    def to_dict(self):
        rv = super().to_dict()
        if self.clause:
            rv['clause'] = self.clause
        if self.level is not None:
            rv['level'] = self.level
        if self.letter is not None:
            rv['letter'] = self.letter
        return rv


class VershikOverflowError(AppException):
    """The successor of an all-maximal path is not defined at finite depth"""

    exit_code = 1

    def __init__(self, message="Path is maximal at every level.", depth=None):
        super().__init__(message, status_code=409)
        self.depth = depth

    def to_dict(self):
        rv = super().to_dict()
        if self.depth is not None:
            rv['depth'] = self.depth
        return rv


def register_error_handlers(app):
    """Register custom error handlers with the Flask app"""

    @app.errorhandler(AppException)
    def handle_app_exception(error):
        app.logger.info(f"{error.__class__.__name__}: {error.message}")
        return error.to_response()

    @app.errorhandler(400)
    def handle_bad_request(error):
        return jsonify({
            'success': False,
            'error': 'BadRequest',
            'message': 'Invalid request.'
        }), 400

    @app.errorhandler(404)
    def handle_not_found(error):
        return jsonify({
            'success': False,
            'error': 'NotFound',
            'message': 'Resource not found.'
        }), 404

    @app.errorhandler(405)
    def handle_method_not_allowed(error):
        return jsonify({
            'success': False,
            'error': 'MethodNotAllowed',
            'message': 'Method not allowed.'
        }), 405

    @app.errorhandler(422)
    def handle_unprocessable(error):
        return jsonify({
            'success': False,
            'error': 'UnprocessableEntity',
            'message': 'Input cannot be processed.'
        }), 422

    @app.errorhandler(500)
    def handle_internal_error(error):
        return jsonify({
            'success': False,
            'error': 'InternalServerError',
            'message': 'Internal server error.'
        }), 500
