import pytest

from repeller.params import ConstructionParams, Partition, Variant


@pytest.fixture(scope="session")
def full_params() -> ConstructionParams:
    # q=1/2, b=3/8 gives exact binary constants: r=1/8, m1=4/3, s=1/3
    return ConstructionParams(variant=Variant.FULL, q=0.5, b=0.375, a=0.7)


@pytest.fixture(scope="session")
def phys_params() -> ConstructionParams:
    return ConstructionParams(
        variant=Variant.PHYSICAL, q=0.4, b=0.3,
        alpha=0.25, beta=0.2, epsilon=0.04,
    )


@pytest.fixture(scope="session")
def full_partition(full_params) -> Partition:
    return Partition.from_params(full_params)


@pytest.fixture(scope="session")
def phys_partition(phys_params) -> Partition:
    return Partition.from_params(phys_params)
