"""
Prometheus metrics for dqhinf
"""
from prometheus_client import Counter, Gauge, Histogram, Info

VERSION = '1.0.0'

# Service information
service_info = Info('dqhinf_service', 'dqhinf service information')
service_info.info({
    'version': VERSION,
    'name': 'dqhinf'
})

# Simulation metrics
simulation_runs_total = Counter(
    'dqhinf_simulation_runs_total',
    'Total number of simulation runs',
    ['controller', 'status']
)

simulation_steps_total = Counter(
    'dqhinf_simulation_steps_total',
    'Total number of simulated control steps',
    ['controller']
)

simulation_duration_seconds = Histogram(
    'dqhinf_simulation_duration_seconds',
    'Wall time spent per simulation run',
    ['controller']
)

singular_region_entries_total = Counter(
    'dqhinf_singular_region_entries_total',
    'Number of times a run entered the singular region',
    ['controller']
)

min_sigma = Gauge(
    'dqhinf_min_sigma',
    'Smallest Jacobian singular value seen in the last run of a scenario',
    ['scenario']
)

# Acceptance metrics
acceptance_checks_total = Counter(
    'dqhinf_acceptance_checks_total',
    'Acceptance flag evaluations',
    ['check', 'result']
)

# HTTP API metrics
http_requests_total = Counter(
    'dqhinf_http_requests_total',
    'Total number of HTTP API requests',
    ['endpoint', 'method', 'status']
)

# Error metrics
errors_total = Counter(
    'dqhinf_errors_total',
    'Total number of errors',
    ['error_type']
)
