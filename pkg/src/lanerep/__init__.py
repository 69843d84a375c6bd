"""Arc-length lane representations, coefficient evolution and a camera-based path-following simulator."""
from ._jit import USE_NUMBA
from .curves import (
    FunctionRepr,
    ParametricRepr,
    RigidMotion2D,
    eval_function,
    eval_parametric,
    extract_preview,
    func_to_param,
    param_to_func,
    shift_function,
    shift_matrix,
    shift_parametric,
    transform_parametric,
)
from .path import (
    CurvatureProfile,
    PathState,
    PathTable,
    closure_check,
    cosine_profile,
    func_repr_at,
    integrate_path,
    param_repr_at,
    state_at,
)

__version__ = "0.1.0"
