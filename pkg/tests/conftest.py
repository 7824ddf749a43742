import pytest

from xducer import load_reference_inputs


@pytest.fixture(scope="session")
def reference_inputs():
    """Validated parameters of the bundled erbium chloride hexahydrate design."""
    return load_reference_inputs()
