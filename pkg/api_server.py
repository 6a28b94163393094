"""
HTTP API server for dqhinf
Provides endpoints for:
- Prometheus metrics scraping (/metrics)
- Running scenario configs via HTTP (/run)
- Health check (/health)
"""
from flask import Flask, request, jsonify
from prometheus_client import generate_latest, CONTENT_TYPE_LATEST
import os
import threading
from typing import Callable, Optional, Sequence

from controllers import CONTROLLER_KINDS
from errors import ConfigError, DqHinfError
from json_logging import log_json
from metrics import VERSION, errors_total, http_requests_total
from scenario_config import build_scenarios, loads

REPO_DIR = os.path.dirname(os.path.abspath(__file__))
# request configs may only name chain files below these
DEFAULT_CHAIN_DIRS = (os.path.join(REPO_DIR, 'chains'), os.path.join(REPO_DIR, 'scenarios'))


class APIServer:
    """Flask-based HTTP API server for dqhinf"""

    def __init__(self, port: int = 9900, host: str = '0.0.0.0', chain_dirs: Optional[Sequence[str]] = None):
        """
        Initialize API server

        Args:
            port: Port to listen on (default: 9900)
            host: Host to bind to (default: 0.0.0.0)
            chain_dirs: Directories request configs may load chains from
                (default: CHAIN_DIRS from the environment, else chains/ and scenarios/)
        """
        self.port = port
        self.host = host
        if chain_dirs is None:
            env = os.getenv('CHAIN_DIRS')
            chain_dirs = env.split(os.pathsep) if env else DEFAULT_CHAIN_DIRS
        self.chain_dirs = tuple(chain_dirs)
        self.app = Flask('dqhinf-api')
        self.batch_runner = None
        self.log_json = log_json

        self._setup_routes()

    def set_batch_runner(self, runner):
        """Set the batch runner that executes /run requests"""
        self.batch_runner = runner

    def set_log_function(self, log_function: Callable):
        """Set the JSON logging function"""
        self.log_json = log_function

    def _setup_routes(self):
        """Setup Flask routes"""

        @self.app.route('/metrics', methods=['GET'])
        def metrics():
            """Prometheus metrics endpoint"""
            http_requests_total.labels(endpoint='/metrics', method='GET', status='200').inc()
            return generate_latest(), 200, {'Content-Type': CONTENT_TYPE_LATEST}

        @self.app.route('/health', methods=['GET'])
        def health():
            """Health check endpoint"""
            http_requests_total.labels(endpoint='/health', method='GET', status='200').inc()
            runs = self.batch_runner.get_stats()['runs_completed'] if self.batch_runner else 0
            return jsonify({
                'status': 'healthy' if self.batch_runner is not None else 'degraded',
                'runs_completed': runs,
                'version': VERSION
            }), 200

        @self.app.route('/controllers', methods=['GET'])
        def controllers():
            http_requests_total.labels(endpoint='/controllers', method='GET', status='200').inc()
            return jsonify({'controllers': list(CONTROLLER_KINDS)}), 200

        @self.app.route('/run', methods=['POST'])
        def run_config():
            """
            Run a scenario config

            Body is the config text, or JSON:
            {
                "config": "[robot]\\nchain = ...",
                "seed": 7  // optional
            }
            """
            if self.batch_runner is None:
                http_requests_total.labels(endpoint='/run', method='POST', status='503').inc()
                return jsonify({'error': 'Batch runner not available'}), 503

            seed = None
            if request.is_json:
                data = request.get_json(silent=True) or {}
                text = data.get('config')
                seed = data.get('seed')
                if seed is not None and not isinstance(seed, int):
                    http_requests_total.labels(endpoint='/run', method='POST', status='400').inc()
                    return jsonify({'error': 'seed must be an integer'}), 400
            else:
                text = request.get_data(as_text=True)

            if not text:
                http_requests_total.labels(endpoint='/run', method='POST', status='400').inc()
                return jsonify({'error': 'Missing config text'}), 400

            try:
                scenarios = build_scenarios(loads(text, path='<request>'), seed=seed, chain_dirs=self.chain_dirs)
            except ConfigError as e:
                http_requests_total.labels(endpoint='/run', method='POST', status='400').inc()
                errors_total.labels(error_type='config_error').inc()
                self.log_json("warning", "Rejected config",
                    event_type="config_error",
                    error=str(e)
                )
                return jsonify({'error': str(e)}), 400

            try:
                results = self.batch_runner.run_all(scenarios)
            except (DqHinfError, OSError) as e:
                http_requests_total.labels(endpoint='/run', method='POST', status='500').inc()
                errors_total.labels(error_type='api_run_error').inc()
                self.log_json("error", f"HTTP API run failed: {str(e)}",
                    event_type="api_run_failed",
                    error=str(e)
                )
                return jsonify({'error': f'Run failed: {str(e)}'}), 500

            http_requests_total.labels(endpoint='/run', method='POST', status='200').inc()
            return jsonify({
                'success': all(r['success'] for r in results),
                'passed': all(r['passed'] for r in results),
                'results': [{'message': r['message'], 'row': r['row']} for r in results]
            }), 200

        @self.app.route('/info', methods=['GET'])
        def info():
            """Get service information"""
            http_requests_total.labels(endpoint='/info', method='GET', status='200').inc()

            return jsonify({
                'name': 'dqhinf',
                'version': VERSION,
                'endpoints': {
                    '/metrics': 'Prometheus metrics (GET)',
                    '/health': 'Health check (GET)',
                    '/controllers': 'Controller kinds (GET)',
                    '/run': 'Run a scenario config (POST)',
                    '/info': 'Service information (GET)'
                }
            }), 200

    def run(self):
        """Run the Flask server (blocking)"""
        self.log_json("info", f"Starting HTTP API server on {self.host}:{self.port}",
            event_type="api_server_starting",
            host=self.host,
            port=self.port
        )

        self.app.run(
            host=self.host,
            port=self.port,
            debug=False,
            use_reloader=False
        )

    def run_in_thread(self):
        """Run the Flask server in a separate thread"""
        thread = threading.Thread(target=self.run, daemon=True)
        thread.start()

        self.log_json("info", "HTTP API server started in background thread",
            event_type="api_server_started",
            host=self.host,
            port=self.port
        )

        return thread
