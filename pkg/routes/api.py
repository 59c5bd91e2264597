# routes/api.py
from flask import Blueprint, current_app, jsonify

from analysis import complexity_table, right_special_report
from bratteli import BratteliDiagram, telescope, validate_diagram
from constructions import (PropertyFailure, amplify_diagram, build_pinf_sequence,
                           build_pk_sequence, build_toeplitz_sequence,
                           check_ds_classes, check_pinf, check_pk, check_toeplitz)
from core_words import DirectiveSequence, Morphism, analyze_morphism
from demos import DEMOS, DemoName, demo_construction, demo_diagram, demo_info
from utils.decorators import int_param, json_body_required
from utils.exceptions import NotFoundError, ValidationError

api_bp = Blueprint('api', __name__, url_prefix='/api/v1')

CONSTRUCTIONS = ('pk', 'pinf', 'toeplitz', 'amplify')
CHECKS = ('pk', 'pinf', 'toeplitz')


# ==================== HELPER FUNCTIONS ====================
def success_response(data=None, message=None, status_code=200):
    """Standard success response"""
    response = {'success': True}
    if data is not None:
        response['data'] = data
    if message:
        response['message'] = message
    return jsonify(response), status_code


def error_response(message, error_type='Error', status_code=400, **kwargs):
    """Standard error response"""
    response = {
        'success': False,
        'error': error_type,
        'message': message
    }
    response.update(kwargs)
    return jsonify(response), status_code


def _demo_kwargs():
    return {
        'levels': current_app.config['DEMO_LEVELS'],
        'subexp_alpha_cap': current_app.config['SUBEXP_ALPHA_CAP'],
        'subexp_max_image_length': current_app.config['SUBEXP_MAX_IMAGE_LENGTH']
    }


def _sequence_from(data):
    """``sequence`` object or ``demo`` name from a request body."""
    if 'demo' in data:
        return demo_construction(data['demo'], **_demo_kwargs()).sequence
    if 'sequence' not in data:
        raise ValidationError("Give 'sequence' or 'demo'.", field='body')
    return DirectiveSequence.from_dict(data['sequence'], location='sequence')


def _diagram_from(data):
    if 'demo' in data:
        return demo_diagram(data['demo'], current_app.config['DEMO_LEVELS'])
    if 'diagram' not in data:
        raise ValidationError("Give 'diagram' or 'demo'.", field='body')
    return BratteliDiagram.from_dict(data['diagram'], location='diagram')


# ==================== INFO ENDPOINTS ====================
@api_bp.route('/health', methods=['GET'])
def health():
    """Service status"""
    return success_response({
        'name': current_app.config['APP_NAME'],
        'version': current_app.config['APP_VERSION']
    })


@api_bp.route('/demos', methods=['GET'])
def list_demos():
    """Built-in demos"""
    return success_response([DEMOS[name].to_dict() for name in DemoName.all()])


@api_bp.route('/demos/<name>', methods=['GET'])
def get_demo(name):
    """One demo with its directive sequence"""
    info = demo_info(name)
    construction = demo_construction(name, **_demo_kwargs())
    data = info.to_dict()
    data.update(construction.to_dict())
    return success_response(data)


# ==================== MORPHISMS & DIAGRAMS ====================
@api_bp.route('/morphisms/analyze', methods=['POST'])
@json_body_required('morphism')
def analyze_morphism_endpoint(data):
    """Incidence matrix, primitivity, properness, hat and injectivity"""
    morphism = Morphism.from_dict(data['morphism'], location='morphism')
    return success_response(analyze_morphism(morphism).to_dict())


@api_bp.route('/diagrams/validate', methods=['POST'])
@json_body_required('diagram')
def validate_diagram_endpoint(data):
    """Structural violations of a diagram"""
    report = validate_diagram(BratteliDiagram.from_dict(data['diagram'], location='diagram'))
    return success_response(report.to_dict())


@api_bp.route('/diagrams/telescope', methods=['POST'])
@json_body_required('diagram', 'keep')
def telescope_endpoint(data):
    """Telescoped diagram"""
    if not isinstance(data['keep'], list):
        raise ValidationError("'keep' must be a list of levels.", field='keep')
    d = BratteliDiagram.from_dict(data['diagram'], location='diagram')
    return success_response(telescope(d, data['keep']).to_dict())


# ==================== CONSTRUCTIONS ====================
@api_bp.route('/constructions/<kind>', methods=['POST'])
@json_body_required()
def construct(data, kind):
    """Property (P_k), (P_∞), Toeplitz and amplification pipelines"""
    if kind not in CONSTRUCTIONS:
        raise NotFoundError(f"Unknown construction '{kind}'.", resource_type='construction', resource_id=kind)
    d = _diagram_from(data)
    if kind == 'amplify':
        derived, certificate = amplify_diagram(d, int_param(data, 'k'), level_margin=int_param(data, 'margin', 1))
        current_app.logger.info(f"Amplified diagram: kept levels {list(certificate.keep)}")
        return success_response({'diagram': derived.to_dict(), 'certificate': certificate.to_dict()})
    if kind == 'pk':
        result = build_pk_sequence(d, int_param(data, 'k'), amplify=bool(data.get('amplify')))
    elif kind == 'pinf':
        result = build_pinf_sequence(d, amplify=bool(data.get('amplify')))
    else:
        result = build_toeplitz_sequence(d, int_param(data, 'k'))
    current_app.logger.info(f"Constructed {kind} sequence with {len(result.sequence)} morphisms")
    return success_response(result.to_dict(), status_code=201)


# ==================== CHECKS ====================
@api_bp.route('/checks/<kind>', methods=['POST'])
@json_body_required()
def run_check(data, kind):
    """Witness or the first violated clause"""
    if kind not in CHECKS:
        raise NotFoundError(f"Unknown check '{kind}'.", resource_type='check', resource_id=kind)
    t = _sequence_from(data)
    levels = int_param(data, 'levels') if 'levels' in data else None
    if kind == 'pk':
        verdict = check_pk(t, int_param(data, 'k'), levels)
    elif kind == 'pinf':
        verdict = check_pinf(t, levels)
    else:
        k = int_param(data, 'k')
        verdict = check_toeplitz(t, k, levels)
        if not isinstance(verdict, PropertyFailure):
            verdict = check_ds_classes(t, k, levels) or verdict
    if isinstance(verdict, PropertyFailure):
        return error_response(verdict.message, 'PropertyViolation', 422,
                              clause=verdict.clause, level=verdict.level, letter=verdict.letter)
    return success_response(verdict.to_dict())


# ==================== ANALYSIS ====================
@api_bp.route('/analysis/complexity', methods=['POST'])
@json_body_required()
def complexity(data):
    """p(m) and h_m up to m_max"""
    t = _sequence_from(data)
    m_max = int_param(data, 'm_max', current_app.config['DEFAULT_M_MAX'])
    rows = complexity_table(t, m_max, int_param(data, 'level', 0, minimum=0),
                            workers=current_app.config['LANGUAGE_WORKERS'],
                            max_text_length=current_app.config['MAX_TEXT_LENGTH'])
    return success_response([row.to_dict() for row in rows])


@api_bp.route('/analysis/right-special', methods=['POST'])
@json_body_required()
def right_special(data):
    """Right-special factors and stable bifurcation branches"""
    t = _sequence_from(data)
    config = current_app.config
    m_max = int_param(data, 'm_max', config['DEFAULT_M_MAX'])
    gap = int_param(data, 'gap', minimum=0) if 'gap' in data else None
    report = right_special_report(t, m_max, gap, int_param(data, 'level', 0, minimum=0),
                                  gap_fraction=config['STABILITY_GAP_FRACTION'],
                                  lift_depth=config['LIFT_DEPTH'], budget=config['PAIR_FIXPOINT_BUDGET'],
                                  workers=config['LANGUAGE_WORKERS'], max_text_length=config['MAX_TEXT_LENGTH'])
    return success_response(report.to_dict(include_words=bool(data.get('words'))))
