import logging
import time
from functools import wraps

logger = logging.getLogger(__name__)


def format_elapsed(elapsed_time: float) -> str:
    hours, rem = divmod(elapsed_time, 3600)
    minutes, seconds = divmod(rem, 60)
    if hours:
        return f"{int(hours)}h {int(minutes)}m {seconds:.2f}s"
    if minutes:
        return f"{int(minutes)}m {seconds:.2f}s"
    return f"{seconds:.2f}s"


def time_it(func):
    """
    Decorator to measure the execution time of a function
    and log it in a human-readable format.
    """
    @wraps(func)
    def wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        elapsed_time = time.perf_counter() - start_time
        logger.debug(f"Execution time of '{func.__name__}': {format_elapsed(elapsed_time)}")
        return result

    return wrapper
