import numpy as np
import pytest

from regrom.operators import RomOperators

# filled by the acceptance tests, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(
                s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


def hat(nodes, i):
    """Explicit P1 hat function and its derivative on ``nodes``."""
    x = nodes

    def phi(t):
        if i > 0 and x[i - 1] <= t <= x[i]:
            return (t - x[i - 1]) / (x[i] - x[i - 1])
        if i < len(x) - 1 and x[i] <= t <= x[i + 1]:
            return (x[i + 1] - t) / (x[i + 1] - x[i])
        return 0.0

    def dphi(t):
        if i > 0 and x[i - 1] <= t < x[i]:
            return 1.0 / (x[i] - x[i - 1])
        if i < len(x) - 1 and x[i] <= t < x[i + 1]:
            return -1.0 / (x[i + 1] - x[i])
        return 0.0

    return phi, dphi


def random_spd(rng, r, scale=10.0):
    Q, _ = np.linalg.qr(rng.standard_normal((r, r)))
    return Q @ np.diag(rng.uniform(0.1, scale, r)) @ Q.T


def random_ops(rng, r, nu=0.01, centered=False, tensor_scale=1.0):
    """Random reduced operators with identity mass and SPD stiffness."""
    S = random_spd(rng, r)
    B = tensor_scale * rng.standard_normal((r, r, r))
    z = np.zeros(r)
    left = rng.standard_normal((r, r)) if centered else np.zeros((r, r))
    right = rng.standard_normal((r, r)) if centered else np.zeros((r, r))
    s_c = rng.standard_normal(r) if centered else z
    m_c = rng.standard_normal(r) if centered else z
    b = rng.standard_normal(r) if centered else z
    return RomOperators(mass_r=np.eye(r), stiff_r=S, b=b,
                        A_lin=-left - right - nu * S,
                        conv_center_left=left, conv_center_right=right,
                        B=B, g=-m_c, nu=nu, stiff_center=s_c,
                        mass_center=m_c)


@pytest.fixture
def rng():
    return np.random.default_rng(20231016)
