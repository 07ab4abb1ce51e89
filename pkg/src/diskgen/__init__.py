"""Generators of holomorphic semigroups of the unit disk.

Build generators from Herglotz measures, Berkson-Porta data or radial
multi-slit data; integrate their flows and Koenigs functions; classify
boundary points into regular poles and regular null points.
"""
from .flow import *  # noqa: F401,F403
from .generator import *  # noqa: F401,F403
from .herglotz import *  # noqa: F401,F403
from .koenigs import *  # noqa: F401,F403
from .multislit import *  # noqa: F401,F403
from .unitdisc import (BoundaryPoint, DiskPoint, Moebius, PointSet, RadialLimitEstimate,  # noqa: F401
                       extrapolate_log_limit, extrapolate_radial_limit, moebius_to_origin, radial_grid)

__version__ = "0.1.0"
