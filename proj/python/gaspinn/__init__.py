"""Gaussian-mixture adaptive sampling for PINN training.

Thin Python surface over the C++ core: network evaluation, PDE benchmark
problems, the adaptive training loop, and the error/cost metrics.
"""

try:
    from ._gaspinn import (  # noqa: F401
        Mlp,
        Problem,
        fns_ans,
        laplace_sigma_1d,
        load_checkpoint,
        mse_on_grid,
        preset_names,
        relative_l2,
        run,
    )
except ImportError:  # extension built out of tree (e.g. the ctest smoke run)
    from _gaspinn import (  # noqa: F401
        Mlp,
        Problem,
        fns_ans,
        laplace_sigma_1d,
        load_checkpoint,
        mse_on_grid,
        preset_names,
        relative_l2,
        run,
    )

__all__ = [
    "Mlp",
    "Problem",
    "fns_ans",
    "laplace_sigma_1d",
    "load_checkpoint",
    "mse_on_grid",
    "preset_names",
    "relative_l2",
    "run",
]
