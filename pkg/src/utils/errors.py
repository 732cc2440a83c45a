"""Exception hierarchy for FeynLab.

Library code raises these; the CLI and the verification suites catch them,
log them and turn them into failed results.
"""


class FeynLabError(Exception):
    """Base class for every error raised by FeynLab"""


class GraphError(FeynLabError):
    """Invalid graph input: self-loops, disconnected graphs, bad indices, size caps"""


class FormError(FeynLabError):
    """Exterior-algebra misuse: mismatched ambients, missing substitutions, degree mismatch"""


class KernelError(FeynLabError):
    """Kernel evaluated outside its domain"""


class GaussianError(FeynLabError):
    """Gaussian data that is not integrable, or a moment above the degree cap"""


class NonGaussianError(GaussianError):
    """An integrand whose exponent is not the declared Gaussian"""

    def __init__(self, message: str, term=None):
        super().__init__(message)
        self.term = term


class ChartError(FeynLabError):
    """Corner chart used outside its domain"""


class ConfigError(FeynLabError):
    """Invalid run configuration"""


class GraphFormatError(FeynLabError):
    """Malformed graph JSON"""

    def __init__(self, message: str, field: str = None, line: int = None):
        location = []
        if field:
            location.append(f"field '{field}'")
        if line:
            location.append(f"line {line}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.field = field
        self.line = line
