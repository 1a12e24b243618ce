"""Turakainen-style conversion of a generalized automaton with a strict
cutpoint into a probabilistic automaton with cutpoint 1/2.

The chain: absorb the cutpoint into one extra affine coordinate; embed
into zero-row-sum matrices two states wider; shift by the all-ones matrix
and rescale to row-stochastic form (the zero row/column sums make every
cross term vanish); split the signed initial vector over a doubled state
space; fold the final vector into end-marker acceptance probabilities.
The output always has exactly 2k+6 states and satisfies

    f_P(w) - 1/2 = (f_G(w) - cutpoint) * (c*m)**(-len(w)) / (2*T*b)

with the constants c, m, T, b recorded in the ConversionReport.  Every
step closes over the rationals when the input does.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .automata import (
    EXACT_MODE,
    GFA,
    PFA,
    member,
)
from .opcore import TAU_EQ


@dataclass(frozen=True)
class ConversionReport:
    """Constants of one conversion run.

    shift is the all-ones shift constant (at least the largest entry
    magnitude of the zero-row-sum matrices), scale the embedded dimension
    k+3, offset/final_scale the affine normalization of the final vector,
    and block_mass the common mass of the two halves of the doubled
    initial vector.
    """

    input_states: int
    output_states: int
    shift: object
    scale: int
    offset: object
    final_scale: object
    block_mass: object

    def factor(self, length: int):
        """Positive factor (shift*scale)**(-length) / (2*T*b) that carries
        f_G - cutpoint onto f_P - 1/2."""
        cm = self.shift * self.scale
        return cm ** (-length) / (2 * self.block_mass * self.final_scale)


def gfa_to_pfa(gfa: GFA, cutpoint) -> tuple[PFA, ConversionReport]:
    """PFA with 2k+6 states recognizing {w : f_G(w) > cutpoint} at strict
    cutpoint 1/2, with the same alphabet.

    In exact mode the sign equivalence is exact; in float mode signs agree
    wherever the scaled margin stays above the ambiguity band.
    """
    exact = gfa.scalar_mode == EXACT_MODE
    one = Fraction(1) if exact else 1.0
    zero = one * 0
    lam = Fraction(cutpoint) if exact else float(cutpoint)
    k = gfa.states
    m = k + 3

    # Step 1: absorb the cutpoint into one affine coordinate so that the
    # extended product equals f_G(w) - cutpoint.
    u_hat = list(gfa.initial) + [one]
    v_hat = list(gfa.final) + [-lam]

    def embedded(a):
        # Step 2: zero first and last rows; last column balances each row
        # to sum zero, so the all-ones matrix is annihilated from both sides.
        rows = [[zero] * m]
        for i in range(k):
            row = list(a[i])
            body = [zero] + row + [zero, -sum(row)]
            rows.append(body)
        rows.append([zero] * (k + 1) + [one, -one])
        rows.append([zero] * m)
        return rows

    c_mats = {sym: embedded(gfa.transitions[sym]) for sym in gfa.alphabet}
    pi0 = [zero] + u_hat + [-sum(u_hat)]
    eta_hat = [zero] + v_hat + [zero]

    # Step 3: shift by the all-ones matrix and rescale to row-stochastic form.
    entries = [abs(x) for rows in c_mats.values() for row in rows for x in row]
    shift = max([one] + entries)
    denom = shift * m
    p_mats = {
        sym: [[(x + shift) / denom for x in row] for row in rows]
        for sym, rows in c_mats.items()
    }

    # Step 4: split the signed initial vector over a doubled state space.
    pi_plus = [x if x > zero else zero for x in pi0]
    pi_minus = [-x if x < zero else zero for x in pi0]
    mass = sum(pi_plus)
    initial = [x / (2 * mass) for x in pi_plus] + [x / (2 * mass) for x in pi_minus]

    # Step 5: normalize the final vector into [0, 1] and route it through
    # the end-marker; stochasticity cancels the affine offset.
    offset = max(zero, -min(eta_hat))
    final_scale = max([one] + [x + offset for x in eta_hat])
    eta_prime = [(x + offset) / final_scale for x in eta_hat]
    two_m = 2 * m
    end = [[zero] * two_m for _ in range(two_m)]
    for i in range(m):
        end[i][0] = eta_prime[i]
        end[i][m] = one - eta_prime[i]
        end[m + i][0] = one - eta_prime[i]
        end[m + i][m] = eta_prime[i]

    def doubled(rows):
        out = [[zero] * two_m for _ in range(two_m)]
        for i in range(m):
            for j in range(m):
                out[i][j] = rows[i][j]
                out[m + i][m + j] = rows[i][j]
        return out

    pfa = PFA(
        alphabet=gfa.alphabet,
        initial=initial,
        transitions={sym: doubled(rows) for sym, rows in p_mats.items()},
        end_marker=end,
        accepting=frozenset({0}),
        scalar_mode=gfa.scalar_mode,
    )
    report = ConversionReport(
        input_states=k,
        output_states=two_m,
        shift=shift,
        scale=m,
        offset=offset,
        final_scale=final_scale,
        block_mass=mass,
    )
    return pfa, report


@dataclass(frozen=True)
class AgreementReport:
    """Outcome of a strict-cutpoint sign comparison over enumerated words."""

    agree: bool
    words_checked: int
    disagreement_count: int
    first_disagreement: tuple[str, ...] | None
    min_margin: object | None
    ambiguous_count: int


def verify_sign_agreement(gfa: GFA, gfa_cutpoint, pfa: PFA, pfa_cutpoint,
                          max_len: int, alphabet=None,
                          tol: float = TAU_EQ) -> AgreementReport:
    """Enumerate every word up to max_len (in length-lexicographic order)
    and compare strict-cutpoint signs of the two automata.

    Reports the first disagreement if any, the minimum margin
    |f_P - cutpoint| over non-ambiguous words, and the ambiguity count.
    """
    symbols = tuple(alphabet) if alphabet is not None else gfa.alphabet
    end_col = np.dot(pfa.end_marker, pfa.accept_indicator())
    queue = deque([((), gfa.initial, pfa.initial)])
    words_checked = 0
    disagreements = 0
    first = None
    min_margin = None
    ambiguous = 0
    while queue:
        word, gx, px = queue.popleft()
        fg = np.dot(gx, gfa.final)
        fp = np.dot(px, end_col)
        mg = member(fg, gfa_cutpoint, tol)
        mp = member(fp, pfa_cutpoint, tol)
        words_checked += 1
        if mg.ambiguous or mp.ambiguous:
            ambiguous += 1
        if not mp.ambiguous:
            margin = abs(fp - pfa_cutpoint)
            if min_margin is None or margin < min_margin:
                min_margin = margin
        if mg.sign != mp.sign:
            disagreements += 1
            if first is None:
                first = word
        if len(word) < max_len:
            for sym in symbols:
                queue.append((
                    word + (sym,),
                    np.dot(gx, gfa.transitions[sym]),
                    np.dot(px, pfa.transitions[sym]),
                ))
    return AgreementReport(
        agree=disagreements == 0,
        words_checked=words_checked,
        disagreement_count=disagreements,
        first_disagreement=first,
        min_margin=min_margin,
        ambiguous_count=ambiguous,
    )
