import os
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional

import metrics
from analysis import acceptance_report, summary_row, write_summary, write_trace_csv
from errors import ConfigError, DqHinfError, SimulationAbortedError
from json_logging import log_json
from scenario_config import load_scenarios
from simulator import ScenarioConfig, run


class BatchRunner:
    """Runs scenario sets on a thread pool and keeps the latest results"""

    def __init__(self, results_dir: str = None, workers: int = None, sqrt_ratio: bool = False):
        if results_dir is None:
            results_dir = os.getenv('RESULTS_DIR', 'results')
        if workers is None:
            workers = int(os.getenv('BATCH_WORKERS', '4'))
        self.results_dir = results_dir
        self.workers = max(1, workers)
        self.sqrt_ratio = sqrt_ratio
        self.results = {}  # {scenario_name: result dict}
        self.lock = threading.Lock()
        self.runs_completed = 0
        self.log_json = log_json

    def set_log_function(self, log_function: Callable):
        """Set the JSON logging function"""
        self.log_json = log_function

    @staticmethod
    def _trace_path(out_dir: str, name: str) -> str:
        root = os.path.realpath(out_dir)
        path = os.path.realpath(os.path.join(root, f'{name}.csv'))
        if os.path.dirname(path) != root:
            raise ConfigError("scenario name escapes the results directory")
        return path

    def run_scenario(self, config: ScenarioConfig, out_dir: str = None) -> Dict[str, Any]:
        """
        Simulate one scenario and write its CSV trace

        Returns:
            Dict with success status, message and the summary row
        """
        out_dir = out_dir or self.results_dir
        try:
            csv_path = self._trace_path(out_dir, config.name)
            trace = run(config)
            report = acceptance_report(trace, config, sqrt_ratio=self.sqrt_ratio)
            write_trace_csv(trace, csv_path)

            for check, ok in report.flags.items():
                metrics.acceptance_checks_total.labels(check=check, result='pass' if ok else 'fail').inc()
            if not report.passed:
                self.log_json("warning", "Acceptance check failed",
                    event_type="acceptance_failed",
                    scenario=config.name,
                    flags=report.flags
                )

            result = {
                'success': True,
                'message': f'{config.name}: {len(trace)} records written to {csv_path}',
                'row': summary_row(trace, report, csv_path),
                'passed': report.passed,
            }
        except SimulationAbortedError as e:
            result = {
                'success': False,
                'message': f'{config.name}: {e}',
                'row': None,
                'passed': False,
            }
        except DqHinfError as e:
            metrics.errors_total.labels(error_type=type(e).__name__).inc()
            self.log_json("error", "Scenario failed",
                event_type="scenario_failed",
                scenario=config.name,
                error=str(e)
            )
            result = {
                'success': False,
                'message': f'{config.name}: {e}',
                'row': None,
                'passed': False,
            }

        with self.lock:
            self.results[config.name] = result
            self.runs_completed += 1
        return result

    def run_all(self, scenarios: List[ScenarioConfig], out_dir: str = None) -> List[Dict[str, Any]]:
        """Run every scenario, write summary.csv once all are done"""
        out_dir = out_dir or self.results_dir
        os.makedirs(out_dir, exist_ok=True)

        self.log_json("info", "Batch started",
            event_type="batch_started",
            scenarios=len(scenarios),
            workers=self.workers,
            out_dir=out_dir
        )

        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            results = list(pool.map(lambda s: self.run_scenario(s, out_dir), scenarios))

        rows = [r['row'] for r in results if r['row'] is not None]
        write_summary(rows, os.path.join(out_dir, 'summary.csv'))

        self.log_json("info", "Batch finished",
            event_type="batch_finished",
            scenarios=len(scenarios),
            failed=sum(1 for r in results if not r['success']),
            passed=sum(1 for r in results if r['passed'])
        )
        return results

    def run_config_files(self, paths: List[str], out_dir: str = None, seed: Optional[int] = None) -> List[Dict[str, Any]]:
        """Load every config file first so a bad file stops the batch before any run"""
        scenarios = []
        for path in paths:
            try:
                scenarios.extend(load_scenarios(path, seed=seed))
            except ConfigError as e:
                metrics.errors_total.labels(error_type='config_error').inc()
                self.log_json("error", "Configuration error",
                    event_type="config_error",
                    error=str(e)
                )
                raise
        return self.run_all(scenarios, out_dir)

    def get_stats(self) -> Dict[str, Any]:
        """Get statistics about completed runs"""
        with self.lock:
            return {
                'runs_completed': self.runs_completed,
                'scenarios': len(self.results),
                'failed': sum(1 for r in self.results.values() if not r['success']),
                'workers': self.workers,
            }
