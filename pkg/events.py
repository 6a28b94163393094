"""
Simulation lifecycle events

The simulator publishes on the simulation.* topics; the listeners here turn
them into log records and metric updates.
"""
from pubsub import pub

import metrics
from json_logging import log_json


def onStarted(scenario, controller, steps, topic=pub.AUTO_TOPIC):
    log_json("debug", "Simulation started",
        event_type="simulation_started",
        topic=topic.getName(),
        scenario=scenario,
        controller=controller,
        steps=steps
    )


def onFinished(scenario, controller, steps, duration, min_sigma, final_error, topic=pub.AUTO_TOPIC):
    metrics.simulation_runs_total.labels(controller=controller, status='finished').inc()
    metrics.simulation_steps_total.labels(controller=controller).inc(steps)
    metrics.simulation_duration_seconds.labels(controller=controller).observe(duration)
    metrics.min_sigma.labels(scenario=scenario).set(min_sigma)
    log_json("info", "Simulation finished",
        event_type="simulation_finished",
        scenario=scenario,
        controller=controller,
        steps=steps,
        duration_seconds=round(duration, 3),
        min_sigma=min_sigma,
        final_error=final_error
    )


def onAborted(scenario, controller, error, topic=pub.AUTO_TOPIC):
    metrics.simulation_runs_total.labels(controller=controller, status='aborted').inc()
    metrics.errors_total.labels(error_type='simulation_aborted').inc()
    log_json("error", "Simulation aborted",
        event_type="simulation_aborted",
        scenario=scenario,
        controller=controller,
        error=error
    )


def onSingularRegion(scenario, controller, t, sigma_min, topic=pub.AUTO_TOPIC):
    metrics.singular_region_entries_total.labels(controller=controller).inc()
    log_json("info", "Entered singular region",
        event_type="singular_region_entered",
        scenario=scenario,
        controller=controller,
        t=t,
        sigma_min=sigma_min
    )


pub.subscribe(onStarted, "simulation.started")
pub.subscribe(onFinished, "simulation.finished")
pub.subscribe(onAborted, "simulation.aborted")
pub.subscribe(onSingularRegion, "simulation.singular_region")
