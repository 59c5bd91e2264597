# config.py
import os

basedir = os.path.abspath(os.path.dirname(__file__))


class Config:
    # Flask Core
    SECRET_KEY = os.environ.get('SECRET_KEY') or 'sadic-lab-dev-key'
    JSON_SORT_KEYS = True

    # Logging
    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'INFO'

    # Application Settings
    APP_NAME = 'S-adic Asymptotic Components Lab'
    APP_VERSION = '1.0.0'

    # Language and right-special analysis
    DEFAULT_M_MAX = int(os.environ.get('DEFAULT_M_MAX') or 64)
    STABILITY_GAP_FRACTION = float(os.environ.get('STABILITY_GAP_FRACTION') or 0.25)
    MAX_TEXT_LENGTH = int(os.environ.get('MAX_TEXT_LENGTH') or 5_000_000)
    LANGUAGE_WORKERS = int(os.environ.get('LANGUAGE_WORKERS') or 1)
    MAX_WINDOW_LENGTH = int(os.environ.get('MAX_WINDOW_LENGTH') or 5_000_000)

    # Fixpoint budget and desubstitution depth
    PAIR_FIXPOINT_BUDGET = int(os.environ.get('PAIR_FIXPOINT_BUDGET') or 12)
    LIFT_DEPTH = int(os.environ.get('LIFT_DEPTH') or 3)

    # Subexponential family guards
    SUBEXP_ALPHA_CAP = int(os.environ.get('SUBEXP_ALPHA_CAP') or 24)
    SUBEXP_MAX_IMAGE_LENGTH = int(os.environ.get('SUBEXP_MAX_IMAGE_LENGTH') or 200_000)

    # Demo diagrams
    DEMO_LEVELS = int(os.environ.get('DEMO_LEVELS') or 8)


class DevelopmentConfig(Config):
    DEBUG = True
    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'DEBUG'


class ProductionConfig(Config):
    DEBUG = False
    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'WARNING'


class TestingConfig(Config):
    TESTING = True
    DEFAULT_M_MAX = 24
    PAIR_FIXPOINT_BUDGET = 8
    SUBEXP_ALPHA_CAP = 12
    DEMO_LEVELS = 6


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}
