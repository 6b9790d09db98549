from __future__ import annotations

import json
import os
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

# built profiles are reused across test sessions
os.environ.setdefault("FRACFUJITA_CACHE", str(Path(__file__).parent / ".profile_cache"))
Path(os.environ["FRACFUJITA_CACHE"]).mkdir(exist_ok=True)


@pytest.fixture(scope="session")
def ml_oracle():
    with open(DATA / "ml_oracle.json") as inf:
        return json.load(inf)["records"]


@pytest.fixture(scope="session")
def kernel_oracle():
    with open(DATA / "kernel_oracle.json") as inf:
        return json.load(inf)["records"]


@pytest.fixture(scope="session")
def profile():
    """``profile(kind, alpha, beta, dim, resolution=512)``, built once per session."""
    from fracfujita.kernels import FractionalParams, build_profile

    built = {}

    def get(kind, alpha, beta, dim, resolution=512):
        key = (kind, alpha, beta, dim, resolution)
        if key not in built:
            built[key] = build_profile(kind, FractionalParams(alpha, beta, 1.0, dim),
                                       resolution=resolution)
        return built[key]

    return get


@pytest.fixture(scope="session")
def estimate_reports():
    """Bound verification for the two admissible acceptance cases."""
    from fracfujita.kernels import FractionalParams, verify_estimates

    return {(1, 0.2): verify_estimates(FractionalParams(0.5, 0.2, 1.0, 1)),
            (3, 0.5): verify_estimates(FractionalParams(0.5, 0.5, 1.0, 3))}
