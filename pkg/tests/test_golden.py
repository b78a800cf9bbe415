"""Golden-file checks of the circuit text format: builders must reproduce
the stored files byte for byte, and a loaded file must count and simulate
identically to a freshly built circuit."""
from pathlib import Path

import numpy as np
import pytest

from schwinger_be import subroutines as sub
from schwinger_be.circuit import dumps, loads, count_resources
from schwinger_be.simulate import simulate_statevector

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "uni_N6_eps1e-2.txt": lambda: sub.uni(6, 1e-2, short_circuit=False)[0],
    "ps2_N8_eps1e-2.txt": lambda: sub.p_s2(8, 1e-2)[0],
    "p2_N8_eps1e-4_delta1e-2.txt": lambda: sub.p2(8, 1e-4, 1e-2)[0],
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_builder_matches_golden_bytes(name):
    assert dumps(CASES[name]()) == (GOLDEN / name).read_text()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_loads_and_counts(name):
    circ = loads((GOLDEN / name).read_text())
    built = CASES[name]()
    assert count_resources(circ).t_real == pytest.approx(
        count_resources(built).t_real)
    assert np.allclose(simulate_statevector(circ),
                       simulate_statevector(built))
