import logging
import sys
from typing import TextIO

import numpy as np
import structlog
from structlog.typing import EventDict, FilteringBoundLogger, WrappedLogger


def _numpy_values(_: WrappedLogger, __: str, event_dict: EventDict) -> EventDict:
    """Plain Python values for numpy scalars and small arrays bound to an entry."""
    for key, value in event_dict.items():
        if isinstance(value, np.generic):
            event_dict[key] = value.item()
        elif isinstance(value, np.ndarray) and value.size <= 16:
            event_dict[key] = value.tolist()
    return event_dict


def _renderer(json_logs: bool) -> list:
    if json_logs:
        return [structlog.processors.dict_tracebacks, structlog.processors.JSONRenderer()]
    return [structlog.dev.ConsoleRenderer(colors=True)]


def setup_structlog(
    log_level: str = "INFO",
    json_logs: bool = True,
    include_timestamp: bool = True,
    stream: TextIO | None = None,
) -> None:
    """
    Configure structlog for the simulator.

    Log lines go to stderr unless ``stream`` is given; stdout is kept for command results.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        json_logs: Emit one JSON object per line instead of colored console output
        include_timestamp: Stamp each entry with an ISO UTC timestamp
        stream: Destination of the log lines
    """
    logging.basicConfig(
        format="%(message)s",
        stream=stream or sys.stderr,
        level=getattr(logging, log_level.upper()),
    )

    processors = [
        # run-level keys bound with bind_run_context
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.CallsiteParameterAdder(
            parameters=[
                structlog.processors.CallsiteParameter.MODULE,
                structlog.processors.CallsiteParameter.LINENO,
            ]
        ),
        _numpy_values,
    ]
    if include_timestamp:
        processors.append(structlog.processors.TimeStamper(fmt="ISO", utc=True))

    structlog.configure(
        processors=processors + _renderer(json_logs),
        wrapper_class=structlog.stdlib.BoundLogger,
        logger_factory=structlog.stdlib.LoggerFactory(),
        context_class=dict,
        cache_logger_on_first_use=True,
    )


def get_logger(name: str | None = None) -> FilteringBoundLogger:
    return structlog.get_logger(name)


def bind_run_context(**values) -> None:
    """Attach run-level keys (seed, model, command) to every later log entry."""
    structlog.contextvars.bind_contextvars(**values)


def clear_run_context() -> None:
    structlog.contextvars.clear_contextvars()
