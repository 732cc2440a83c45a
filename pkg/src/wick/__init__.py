from .gaussian import GaussianSpec, LinearFactor, factors_moment, gaussian_moment, hafnian
from .oracle import gaussian_moment_oracle
from .positions import integrate_positions
