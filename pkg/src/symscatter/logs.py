import functools
import logging
import time


def format_seconds(seconds):
    """Converts a floating-point seconds value to format hh:mm:ss format."""
    minutes, seconds = divmod(int(seconds), 60)
    hours, minutes = divmod(minutes, 60)
    return f"{hours:02}:{minutes:02}:{seconds:02}"


def time_function(func, *args, **kwargs):
    """Returns the elapsed time in seconds for a function to run, along with its result."""
    start_time = time.monotonic()
    result = func(*args, **kwargs)
    end_time = time.monotonic()
    return end_time - start_time, result


def log_time(func_name: str, logger: logging.Logger):
    """Decorator function that calculates how long it takes for a function to run and then logs that time.

    Args:
        func_name (str): Name of function to be wrapped.
        Set up configurations for run_experiment and run_replication functions
        logger (logging.Logger): logger initialized in the module this decorator is used in

    Raises:
        ValueError: If the configuration is not supported, error is raised.

    Returns:
        log: log containing timestamp for function run.
    """
    if func_name not in ["run_experiment", "run_replication"]:
        raise ValueError(
            f"configuration {func_name} not supported for log_time decorator."
        )

    def log(func):
        @functools.wraps(func)
        def wrapped(*args, **kwargs):
            if func_name == "run_replication":
                rep = kwargs["rep"]
                logger.debug("Now running replication %s", rep)
                elapsed_time, result = time_function(func, *args, **kwargs)
                logger.debug(
                    "Elapsed time: %s for replication %s",
                    format_seconds(elapsed_time),
                    rep,
                )
                return result

            config = kwargs["config"]
            logger.info(
                "Experiment has started: n=%s, q=%s, reps=%s",
                config.n,
                config.q,
                config.reps,
            )
            elapsed_time, result = time_function(func, *args, **kwargs)
            logger.info("Experiment has completed")
            logger.info("Elapsed time: %s for all replications", format_seconds(elapsed_time))
            return result

        return wrapped

    return log
