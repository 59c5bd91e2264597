# app.py
from flask import Flask
from dotenv import load_dotenv
import logging
import os

# Load environment variables from .env file
load_dotenv()

from config import config
from utils.exceptions import register_error_handlers


def create_app(config_name='default'):
    """Application factory"""
    app = Flask(__name__)

    # Load configuration
    app.config.from_object(config[config_name])
    app.json.sort_keys = app.config['JSON_SORT_KEYS']
    app.logger.setLevel(getattr(logging, app.config['LOG_LEVEL'], logging.INFO))

    # Register blueprints
    from routes import api_bp

    app.register_blueprint(api_bp)

    # Register error handlers
    register_error_handlers(app)

    app.logger.info(f"{app.config['APP_NAME']} {app.config['APP_VERSION']} ready ({config_name})")
    return app


if __name__ == '__main__':
    app = create_app(os.environ.get('FLASK_CONFIG', 'development'))
    app.run(debug=app.config.get('DEBUG', False), host='0.0.0.0', port=5000)
