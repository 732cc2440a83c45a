import logging
import os
from datetime import datetime
from pathlib import Path

class FeynLabLogger:
    """Centralized logging system for FeynLab"""

    def __init__(self, name: str = "feynlab"):
        self.name = name
        self.logger = self._setup_logger()

    def _setup_logger(self):
        """Setup logger with file and console handlers"""
        logs_dir = Path(os.getenv("FEYNLAB_LOG_DIR", "logs"))
        logs_dir.mkdir(parents=True, exist_ok=True)

        logger = logging.getLogger(self.name)
        logger.setLevel(logging.DEBUG)

        # Clear existing handlers
        logger.handlers.clear()

        detailed_formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'
        )
        simple_formatter = logging.Formatter(
            '%(asctime)s - %(levelname)s - %(message)s'
        )

        stamp = datetime.now().strftime('%Y%m%d')

        # File handler for all logs
        file_handler = logging.FileHandler(logs_dir / f"feynlab_{stamp}.log")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(detailed_formatter)

        # File handler for errors only
        error_handler = logging.FileHandler(logs_dir / f"errors_{stamp}.log")
        error_handler.setLevel(logging.ERROR)
        error_handler.setFormatter(detailed_formatter)

        # Quadrature and verification events
        quadrature_handler = logging.FileHandler(logs_dir / f"quadrature_{stamp}.log")
        quadrature_handler.setLevel(logging.INFO)
        quadrature_handler.setFormatter(simple_formatter)

        # Console handler (only warnings and above)
        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.WARNING)
        console_handler.setFormatter(simple_formatter)

        logger.addHandler(file_handler)
        logger.addHandler(error_handler)
        logger.addHandler(quadrature_handler)
        logger.addHandler(console_handler)

        return logger

    def debug(self, message: str):
        """Log debug message"""
        self.logger.debug(message)

    def info(self, message: str):
        """Log info message"""
        self.logger.info(message)

    def warning(self, message: str):
        """Log warning message"""
        self.logger.warning(message)

    def error(self, message: str):
        """Log error message"""
        self.logger.error(message)

    def critical(self, message: str):
        """Log critical message"""
        self.logger.critical(message)

    def quadrature(self, operation: str, nodes: int, value: complex = None,
                   error: float = None, duration: float = None):
        """Log a finished quadrature run"""
        message = f"QUADRATURE - {operation} - nodes={nodes}"
        if value is not None:
            message += f" - value={complex(value):.10g}"
        if error is not None:
            message += f" - err={error:.3e}"
        if duration:
            message += f" - {duration:.2f}s"
        self.logger.info(message)

    def check_result(self, name: str, passed: bool, measured: float = None, tolerance: float = None):
        """Log the outcome of a numeric verification"""
        message = f"CHECK - {name} - {'PASSED' if passed else 'FAILED'}"
        if measured is not None:
            message += f" - measured={measured:.3e}"
        if tolerance is not None:
            message += f" - tol={tolerance:.3e}"
        if passed:
            self.logger.info(message)
        else:
            self.logger.warning(message)

    def extrapolation(self, operation: str, levels: int, status: str):
        """Log Richardson extrapolation status"""
        message = f"EXTRAPOLATION - {operation} - levels={levels} - {status}"
        if status == "ok":
            self.logger.debug(message)
        else:
            self.logger.warning(message)

    def user_action(self, action: str, details: str = None):
        """Log user actions"""
        message = f"USER_ACTION - {action}"
        if details:
            message += f" - {details}"
        self.logger.info(message)

    def performance(self, operation: str, duration: float):
        """Log performance metrics"""
        self.logger.info(f"PERFORMANCE - {operation} - {duration:.2f}s")

# Global logger instance
logger = FeynLabLogger()
