import pytest

from bvlab.arith import build_tables


@pytest.fixture(scope="session")
def tables():
    """Shared sieve tables up to 10^4 (enough for most desk tests)."""
    return build_tables(10**4)


@pytest.fixture(scope="session")
def tables_large():
    """Tables up to 10^6 for the progression-error scans."""
    return build_tables(10**6)
