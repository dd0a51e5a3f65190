import pytest

import rankmass as rm
from rankmass.sample_graphs import bowtie_sample, heavy_dangling_sample, three_block_sample

import helpers


@pytest.fixture(scope="session")
def bowtie():
    return bowtie_sample()


@pytest.fixture(scope="session")
def bowtie_labels(bowtie):
    return rm.bowtie_labeling(bowtie)


@pytest.fixture(scope="session")
def bowtie_blocks(bowtie, bowtie_labels):
    return rm.block_decomposition(bowtie, bowtie_labels)


@pytest.fixture(scope="session")
def threeblock():
    return three_block_sample()


@pytest.fixture(scope="session")
def threeblock_labels(threeblock):
    return rm.bowtie_labeling(threeblock)


@pytest.fixture(scope="session")
def threeblock_blocks(threeblock, threeblock_labels):
    return rm.block_decomposition(threeblock, threeblock_labels)


@pytest.fixture(scope="session")
def threeblock_view(threeblock, threeblock_labels):
    return rm.three_block_view(threeblock, threeblock_labels)


@pytest.fixture(scope="session")
def heavy():
    return heavy_dangling_sample()


@pytest.fixture(scope="session")
def heavy_view(heavy):
    return rm.three_block_view(heavy, rm.bowtie_labeling(heavy))


@pytest.fixture(scope="session")
def random_graphs():
    """The fixed 20-graph assumption-satisfying suite shared by all tests."""
    return helpers.random_suite()
