from .charts import (CornerChart, Flag, chart_normalization_residuals, chart_to_interior, flags_of,
                     interior_to_chart, scale_action, t_square)
from .extended import extended_d_inverse, extended_m_inverse
from .quadrature import (BoxDomain, FaceDomain, IntegralResult, SphereDomain, integrate_form,
                         pyramid_rule, richardson_limit, sphere_patch_quadrature)
from .strata import BoundaryStratum, boundary_strata, fit_sign_table, stratum_integral
