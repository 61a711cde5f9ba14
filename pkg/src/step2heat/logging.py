"""Logging configuration for step2heat.

Every module obtains its logger through :func:`get_logger`, so the whole library
logs under the ``step2heat`` namespace with one consistent format. Kernel
evaluations log truncation radii, node counts and cache misses at DEBUG level.
"""

import logging
import sys

PACKAGE_LOGGER = "step2heat"


class ColoredFormatter(logging.Formatter):
    """Formatter that colours the level name when writing to a terminal."""

    # ANSI color codes
    COLORS = {
        "DEBUG": "\033[0;36m",  # Cyan
        "INFO": "\033[0;32m",  # Green
        "WARNING": "\033[0;33m",  # Yellow
        "ERROR": "\033[0;31m",  # Red
        "CRITICAL": "\033[0;35m",  # Magenta
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        """Format the log record, colouring the level name on a TTY."""
        levelname = record.levelname
        if levelname in self.COLORS and sys.stderr.isatty():
            record.levelname = f"{self.COLORS[levelname]}{levelname}{self.RESET}"

        result = super().format(record)

        # Restore for other handlers
        record.levelname = levelname

        return result


def setup_logging(
    level: int = logging.WARNING,
    format_string: str | None = None,
    use_color: bool = True,
) -> None:
    """Configure the ``step2heat`` logger.

    The command line tool calls it with WARNING level, or DEBUG under
    ``--verbose``, so that CSV output on standard output stays clean.

    Args:
        level: Logging level (default: WARNING)
        format_string: Custom format string (default: structured format)
        use_color: Whether to colour level names on a terminal (default: True)

    Example:
        >>> from step2heat.logging import setup_logging
        >>> import logging
        >>> setup_logging(level=logging.DEBUG)
    """
    if format_string is None:
        format_string = (
            "%(asctime)s | %(levelname)-8s | %(name)s:%(lineno)d | %(funcName)s | %(message)s"
        )

    formatter: logging.Formatter
    if use_color:
        formatter = ColoredFormatter(format_string, datefmt="%Y-%m-%d %H:%M:%S")
    else:
        formatter = logging.Formatter(format_string, datefmt="%Y-%m-%d %H:%M:%S")

    package_logger = logging.getLogger(PACKAGE_LOGGER)
    package_logger.setLevel(level)
    package_logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    package_logger.addHandler(console_handler)

    package_logger.propagate = False


def get_logger(name: str) -> logging.Logger:
    """Get a logger inside the ``step2heat`` namespace.

    Args:
        name: Logger name (typically ``__name__`` of the module)

    Returns:
        Logger whose name is prefixed with the package name

    Example:
        >>> from step2heat.logging import get_logger
        >>> logger = get_logger(__name__)
        >>> logger.debug("truncation radius %.3f", 31.2)
    """
    if not name.startswith(PACKAGE_LOGGER):
        name = f"{PACKAGE_LOGGER}.{name}"

    return logging.getLogger(name)


setup_logging()
