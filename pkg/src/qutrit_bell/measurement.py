"""The coarse-grained joint measurement and its four outcomes.

Alice (site N-1) and Bob (site N) each test whether their qutrit is in
state 0 or in the {+1, -1} subspace, without resolving the sign. Outcomes:

* Psi1    - both negative: the excitations remain in sites 1..N-2;
* Psi2    - Alice positive, Bob negative;
* Psi3    - Bob positive, Alice negative;
* Success - both positive: the pair is projected onto span{|N-1,N>, |N,N-1>}.

On graphs with the protocol symmetry the two projected amplitudes are
equal, so the heralded state is exactly the Bell combination and the
heralded probability equals the projection probability.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .dynamics import Wavefunction, pair_index
from .topology import Graph

NORM_TOL = 1e-8
ZERO_PROB = 1e-12


class Outcome(Enum):
    PSI1 = "psi1"
    PSI2 = "psi2"
    PSI3 = "psi3"
    SUCCESS = "success"


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of the four measurement outcomes.

    ``pS_projection`` is the probability of the both-positive outcome;
    ``pS_bell`` weights it by the overlap with the Bell combination. The
    two coincide on symmetric graphs.
    """

    p1: float
    p2: float
    p3: float
    pS_projection: float
    pS_bell: float

    @property
    def p_unusable(self) -> float:
        """Probability of an asymmetric outcome, forcing a reset."""
        return self.p2 + self.p3


@lru_cache(maxsize=64)
def _index_groups(n: int) -> dict:
    """Dense indices of the four projector supports for an N-site graph."""
    alice, bob = n - 1, n
    i_ba = pair_index(n, bob, alice)
    i_ab = pair_index(n, alice, bob)
    g1, g2, g3 = [], [], []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            k = pair_index(n, i, j)
            touches_a = alice in (i, j)
            touches_b = bob in (i, j)
            if touches_a and touches_b:
                continue  # the two success rows
            if touches_a:
                g2.append(k)
            elif touches_b:
                g3.append(k)
            else:
                g1.append(k)
    return {"success": np.array([i_ba, i_ab]), "g1": np.array(g1),
            "g2": np.array(g2), "g3": np.array(g3)}


def outcome_distribution(psi: Wavefunction, g: Graph) -> OutcomeDistribution:
    n = g.n_vertices
    if g.roles.alice != n - 1 or g.roles.bob != n:
        raise ValueError("measurement requires alice=N-1 and bob=N")
    a = psi.amplitudes
    if abs(np.linalg.norm(a) - 1.0) > NORM_TOL:
        raise ValueError(f"wavefunction norm deviates from 1 by more than {NORM_TOL}")
    grp = _index_groups(n)
    i_ba, i_ab = grp["success"]
    p2 = float(np.sum(np.abs(a[grp["g2"]]) ** 2))
    p3 = float(np.sum(np.abs(a[grp["g3"]]) ** 2))
    p_success = float(np.abs(a[i_ba]) ** 2 + np.abs(a[i_ab]) ** 2)
    p1 = max(0.0, 1.0 - p2 - p3 - p_success)
    p_bell = 0.5 * float(np.abs(a[i_ba] + a[i_ab]) ** 2)
    return OutcomeDistribution(p1=p1, p2=p2, p3=p3,
                               pS_projection=p_success, pS_bell=p_bell)


def post_state(psi: Wavefunction, outcome: Outcome, g: Graph) -> Wavefunction:
    """Renormalized projection of psi onto the requested outcome's support.

    The time stamp restarts at zero: schedule times are measured relative
    to the most recent measurement.
    """
    n = g.n_vertices
    grp = _index_groups(n)
    keep = {Outcome.PSI1: grp["g1"], Outcome.PSI2: grp["g2"],
            Outcome.PSI3: grp["g3"], Outcome.SUCCESS: grp["success"]}[outcome]
    projected = np.zeros_like(psi.amplitudes)
    projected[keep] = psi.amplitudes[keep]
    weight = float(np.sum(np.abs(projected) ** 2))
    if weight < ZERO_PROB:
        raise ValueError(f"outcome {outcome.name} has probability {weight:.3e} < {ZERO_PROB}; "
                         "refusing to condition on it")
    return Wavefunction(amplitudes=projected / np.sqrt(weight), time_stamp=0.0)


def bell_fidelity(psi: Wavefunction, g: Graph) -> float:
    """Overlap of the success-projected state with the Bell combination.

    Returns |a_BA + a_AB|^2 / (2 (|a_BA|^2 + |a_AB|^2)), or 0 when the
    projection carries no weight.
    """
    n = g.n_vertices
    i_ba = pair_index(n, g.roles.bob, g.roles.alice)
    i_ab = pair_index(n, g.roles.alice, g.roles.bob)
    a_ba, a_ab = psi.amplitudes[i_ba], psi.amplitudes[i_ab]
    denom = float(np.abs(a_ba) ** 2 + np.abs(a_ab) ** 2)
    if denom < 1e-14:
        return 0.0
    return 0.5 * float(np.abs(a_ba + a_ab) ** 2) / denom
