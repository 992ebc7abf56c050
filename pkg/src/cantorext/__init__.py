"""Minimal Cantor systems from ordered Bratteli diagrams and their IFS extensions."""
from .bratteli import (
    Edge,
    OrderedBratteliDiagram,
    Ordering,
    ValidationReport,
    check_properly_ordered,
    extreme_path,
    greedy_cuts,
    incidence_matrix,
    reverse_order,
    telescope,
    transfer_matrix,
    unroll,
    validate_diagram,
)
from .errors import *  # noqa: F401,F403
from .extension import (
    Bounded,
    Copy,
    EdgeLabeling,
    Exact,
    ExtendedPoint,
    Singleton,
    Type1,
    Type2,
    approach,
    auto_label,
    bounded_point,
    check_semiconjugacy,
    classify_point,
    density_probe,
    exact_point,
    extended_cylinder,
    extended_inverse_step,
    extended_orbit,
    extended_step,
    fiber,
    first_visits,
    identity_point,
    lift_measure,
    subregions,
    validate_labeling,
)
from .ifs import (
    IDENTITY,
    ContractionSystem,
    DigitPoint,
    attractor_sample,
    cover_check,
    digit_system,
    preset,
    similitude_system,
)
from .vershik import (
    Interval,
    K0Element,
    PathPoint,
    cylinder_measure,
    inverse_vershik_map,
    k0_equal,
    k0_map,
    max_point,
    min_point,
    orbit,
    path_point,
    vershik_map,
    with_tail,
)


def odometer(base: int = 3) -> OrderedBratteliDiagram:
    """The stationary ``base``-adic odometer: one vertex per level, ``base`` edges."""
    return OrderedBratteliDiagram.from_counts([1, 1], [[(0, 0, r) for r in range(base)]], 0)
