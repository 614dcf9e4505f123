import itertools

import numpy as np
import pytest

from syncsbm.group import cyclic_group, group_from_tables


def s3_tables():
    """S_3 built directly from permutation composition, independent of the library."""
    perms = list(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(perms)}
    table = [[idx[tuple(a[b[x]] for x in range(3))] for b in perms] for a in perms]
    inverse = [idx[tuple(sorted(range(3), key=lambda x: a[x]))] for a in perms]
    return table, inverse, idx[(0, 1, 2)]


@pytest.fixture(scope="session")
def s3():
    return group_from_tables(*s3_tables())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def brute_force_feasible(n, group, edges):
    """Exhaustive search over all group assignments of n nodes."""
    if not edges:
        return True
    G = np.indices((group.order,) * n).reshape(n, -1).T
    ok = np.ones(G.shape[0], dtype=bool)
    for i, j, h in edges:
        ok &= group.compose_table[G[:, i], group.inverse_table[G[:, j]]] == h
        if not ok.any():
            return False
    return bool(ok.any())


def groups_up_to(m):
    return [cyclic_group(k) for k in range(1, m + 1)]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("C", 1)[1].split()[0])):
            terminalreporter.write_line(line)
