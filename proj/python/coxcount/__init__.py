from ._coxcount import (
    Surface,
    alpha,
    builtin_sextic,
    count_csv,
    coverage,
    gamma,
    hom_count,
    hom_count_oracle,
    load_surface,
    load_surface_file,
    n_terms,
    point_count,
)

__all__ = [
    "Surface",
    "alpha",
    "builtin_sextic",
    "count_csv",
    "coverage",
    "gamma",
    "hom_count",
    "hom_count_oracle",
    "load_surface",
    "load_surface_file",
    "n_terms",
    "point_count",
]
