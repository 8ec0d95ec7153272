import logging

import numpy as np

from lindbladcraft.logger import bind_run_context, clear_run_context, get_logger, setup_structlog

logger = get_logger(__name__)


def test_logger():
    logger.debug("debug message")
    logger.info("info message")
    logger.error("error message")
    logger.exception(Exception("exception message"))


def test_logger_run_context(caplog):
    setup_structlog(log_level="INFO", json_logs=True)
    caplog.set_level(logging.INFO)
    bind_run_context(master_seed=7, model="damping")
    try:
        get_logger("lindbladcraft.tests").info("context message")
    finally:
        clear_run_context()
    messages = [record.getMessage() for record in caplog.records]
    assert any("context message" in m and '"master_seed": 7' in m for m in messages)


def test_logger_numpy_values(caplog):
    setup_structlog(log_level="INFO", json_logs=True)
    caplog.set_level(logging.INFO)
    get_logger("lindbladcraft.tests").info("numpy message", seed=np.int64(3), errors=np.array([0.5, 0.25]))
    messages = [record.getMessage() for record in caplog.records]
    assert any('"seed": 3' in m and '"errors": [0.5, 0.25]' in m for m in messages)
