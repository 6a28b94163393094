"""
JSON logging for dqhinf

Every record is a single JSON object; extra fields passed to log_json are
merged into it.
"""
import json
import logging
import os
from datetime import datetime
from zoneinfo import ZoneInfo

LOGGER_NAME = 'dqhinf'

TIMEZONE = ZoneInfo(os.getenv('LOG_TIMEZONE', 'UTC'))


class JSONFormatter(logging.Formatter):
    def format(self, record):
        local_time = datetime.fromtimestamp(record.created, TIMEZONE)
        log_entry = {
            "timestamp": local_time.isoformat(),
            "level": record.levelname,
            "logger": LOGGER_NAME,
            "message": record.getMessage(),
        }

        # Add extra fields if they exist
        if hasattr(record, 'extra'):
            log_entry.update(record.extra)

        return json.dumps(log_entry, ensure_ascii=False, default=str)


logger = logging.getLogger(LOGGER_NAME)


def setup_logging(level: str = None):
    """
    Route everything through the dqhinf JSON logger

    Args:
        level: Log level name; defaults to the LOG_LEVEL environment variable
    """
    level = (level or os.getenv('LOG_LEVEL', 'INFO')).upper()

    logging.getLogger().handlers.clear()
    logging.getLogger().setLevel(logging.CRITICAL)

    logger.setLevel(getattr(logging, level, logging.INFO))
    logger.propagate = False
    if not logger.handlers:
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(JSONFormatter())
        logger.addHandler(console_handler)

    # Flask's request log is noise next to ours
    logging.getLogger('werkzeug').setLevel(logging.ERROR)


def log_json(level, message, **extra_fields):
    """Helper function to log with extra fields"""
    levelno = getattr(logging, level.upper())
    if not logger.isEnabledFor(levelno):
        return
    record = logger.makeRecord(
        logger.name, levelno,
        "", 0, message, (), None
    )
    record.extra = extra_fields
    logger.handle(record)
