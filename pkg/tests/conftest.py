import sys
from pathlib import Path

import pytest

from countbmc.net import PetriNet
from countbmc.solver import SolverConfig

REPO = Path(__file__).resolve().parent.parent
NETS = REPO / "nets"
GOLDENS = Path(__file__).resolve().parent / "goldens"


def ups_arcs():
    # spawn, load, run, deschedule, block, interrupt, terminate, remove
    return {
        ("t0", "p0"): 1,
        ("p0", "t1"): 1,
        ("t1", "p1"): 1,
        ("p1", "t2"): 1,
        ("t2", "p2"): 1,
        ("p2", "t3"): 1,
        ("t3", "p1"): 1,
        ("p2", "t4"): 1,
        ("t4", "p3"): 1,
        ("p3", "t5"): 1,
        ("t5", "p1"): 1,
        ("p2", "t6"): 1,
        ("t6", "p4"): 1,
        ("p4", "t7"): 1,
    }


@pytest.fixture(scope="session")
def ups() -> PetriNet:
    return PetriNet(
        places=("p0", "p1", "p2", "p3", "p4"),
        transitions=("t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7"),
        arcs=ups_arcs(),
        initial_marking=(0, 0, 0, 0, 0),
    )


@pytest.fixture(scope="session")
def aps() -> PetriNet:
    return PetriNet(
        places=tuple(f"p{i}" for i in range(9)),
        transitions=tuple(f"t{i}" for i in range(8)),
        arcs={
            ("t0", "p0"): 1,
            ("p0", "t1"): 1,
            ("p1", "t1"): 1,
            ("t1", "p3"): 1,
            ("t1", "p7"): 1,
            ("p3", "t2"): 1,
            ("t2", "p2"): 1,
            ("p2", "t3"): 1,
            ("t3", "p4"): 1,
            ("t3", "p5"): 1,
            ("p0", "t4"): 1,
            ("p1", "t4"): 1,
            ("t4", "p6"): 1,
            ("t4", "p8"): 1,
            ("p4", "t5"): 1,
            ("p5", "t6"): 1,
            ("p7", "t6"): 1,
            ("t6", "p1"): 1,
            ("p8", "t7"): 1,
            ("t7", "p1"): 1,
        },
        initial_marking=(0, 1, 0, 0, 0, 0, 0, 0, 0),
    )


@pytest.fixture(scope="session")
def refsolver_cfg() -> SolverConfig:
    return SolverConfig((sys.executable, "-m", "countbmc.refsolver"), timeout=120.0)
