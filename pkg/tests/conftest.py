from __future__ import annotations

import pytest

from shorsim import ArithParams, RegisterLayout, build_modexp


@pytest.fixture(scope="session")
def factoring_15():
    """The standard demonstration instance: n=15, x=7, q=130."""
    params = ArithParams.create(15, 7, 130)
    layout = RegisterLayout.for_factoring(params.bits, q=130)
    net = build_modexp(params, layout)
    return params, layout, net
