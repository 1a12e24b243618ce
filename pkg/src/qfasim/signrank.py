"""Prefix-suffix sign matrices, low-rank sign realizations, numerical
rank, and the square spectral certificate."""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .automata import MOQFA, PFA, acceptance_grid, as_word, member, pfa_run
from .opcore import TAU_EQ, TAU_RANK, frozen_array

SIGN_FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class SignMatrix:
    """A +/-1 matrix over labeled prefix and suffix words."""

    row_labels: tuple[tuple[str, ...], ...]
    col_labels: tuple[tuple[str, ...], ...]
    signs: np.ndarray

    def __post_init__(self):
        signs = np.asarray(self.signs, dtype=np.int8)
        if signs.ndim != 2:
            raise ValueError("signs must be a matrix")
        if not np.all(np.abs(signs) == 1):
            raise ValueError("sign entries must be exactly +1 or -1")
        rows = tuple(as_word(w) for w in self.row_labels)
        cols = tuple(as_word(w) for w in self.col_labels)
        if signs.shape != (len(rows), len(cols)):
            raise ValueError(
                f"label counts {(len(rows), len(cols))} do not match shape {signs.shape}")
        object.__setattr__(self, "row_labels", rows)
        object.__setattr__(self, "col_labels", cols)
        object.__setattr__(self, "signs", frozen_array(signs))

    @property
    def shape(self) -> tuple[int, int]:
        return self.signs.shape


def all_sign_vectors(d: int) -> list[tuple[int, ...]]:
    """All sign vectors of length d in the canonical order: read as a
    binary counter with +1 as bit 1 and index 1 most significant, counting
    down so the all-plus vector comes first."""
    if not 1 <= d <= 20:
        raise ValueError("d must be between 1 and 20")
    out = []
    for v in range(2 ** d - 1, -1, -1):
        out.append(tuple(1 if (v >> (d - 1 - j)) & 1 else -1 for j in range(d)))
    return out


def sign_pattern_label(eta) -> str:
    return "".join("+" if x > 0 else "-" for x in eta)


def complete_shattering(d: int) -> SignMatrix:
    """The d x 2^d matrix whose columns enumerate all sign patterns."""
    if not 1 <= d <= 20:
        raise ValueError("d must be between 1 and 20")
    vals = np.arange(2 ** d - 1, -1, -1, dtype=np.int64)
    shifts = np.arange(d - 1, -1, -1, dtype=np.int64)
    signs = (((vals[None, :] >> shifts[:, None]) & 1) * 2 - 1).astype(np.int8)
    row_labels = tuple((str(j + 1),) for j in range(d))
    col_labels = tuple((sign_pattern_label(col),) for col in signs.T)
    return SignMatrix(row_labels, col_labels, signs)


def sign_matrix(automaton, cutpoint, prefixes, suffixes,
                tol: float = TAU_EQ) -> SignMatrix:
    """Strict-cutpoint sign of every prefix+suffix concatenation.

    Ambiguous entries (float values inside the tol band) default to -1 and
    trigger a single warning with their count.
    """
    prefixes = [as_word(x) for x in prefixes]
    suffixes = [as_word(y) for y in suffixes]
    values = acceptance_grid(automaton, prefixes, suffixes)
    signs = np.empty(values.shape, dtype=np.int8)
    ambiguous = 0
    for i in range(values.shape[0]):
        for j in range(values.shape[1]):
            verdict = member(values[i, j], cutpoint, tol)
            signs[i, j] = verdict.sign
            ambiguous += verdict.ambiguous
    if ambiguous:
        warnings.warn(
            f"{ambiguous} grid value(s) within {tol} of the cutpoint default to -1",
            stacklevel=2)
    return SignMatrix(tuple(prefixes), tuple(suffixes), signs)


@dataclass(frozen=True, eq=False)
class RealizationMatrix:
    """A real matrix sign-consistent with a sign pattern, with the rank
    bound its construction guarantees."""

    matrix: np.ndarray
    claimed_rank_bound: int
    source: str
    epsilon: float
    shifted_cutpoint: float

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.float64)
        if mat.ndim != 2:
            raise ValueError("realization must be a matrix")
        object.__setattr__(self, "matrix", frozen_array(mat))


def sign_consistent(realization, sign: SignMatrix, tol: float = 0.0) -> bool:
    """Strict entrywise sign agreement S * R > tol."""
    mat = realization.matrix if isinstance(realization, RealizationMatrix) else np.asarray(realization, dtype=float)
    if mat.shape != sign.shape:
        raise ValueError(f"shape mismatch: {mat.shape} vs {sign.shape}")
    return bool(np.all(sign.signs * mat > tol))


def _shift_epsilon(values: np.ndarray, cutpoint: float) -> float:
    # Half the minimum positive gap on the grid, floored at 1e-12; 1e-6
    # when no value exceeds the cutpoint.
    gaps = values - cutpoint
    positive = gaps[gaps > 0]
    if positive.size == 0:
        return 1e-6
    return max(1e-12, float(positive.min()) / 2.0)


def pfa_realization(pfa: PFA, cutpoint, prefixes, suffixes) -> RealizationMatrix:
    """Rank-(state count) realization of a PFA's strict sign pattern.

    Entry (x, y) is a_x . b_y - mu' where a_x is the distribution after the
    prefix, b_y the conditional acceptance column for the suffix plus
    end-marker, and mu' the cutpoint nudged past the smallest positive gap;
    the shift folds into the same coordinates because each a_x sums to 1.
    """
    prefixes = [as_word(x) for x in prefixes]
    suffixes = [as_word(y) for y in suffixes]
    a_rows = np.array([[float(v) for v in pfa_run(pfa, x)] for x in prefixes])
    end_col = np.array([float(v) for v in np.dot(pfa.end_marker, pfa.accept_indicator())])
    trans = {sym: np.asarray(mat, dtype=np.float64)
             for sym, mat in pfa.transitions.items()}
    b_cols = []
    for y in suffixes:
        col = end_col
        for sym in reversed(y):
            if sym not in trans:
                raise ValueError(f"symbol {sym!r} is not in the alphabet")
            col = trans[sym] @ col
        b_cols.append(col)
    values = a_rows @ np.column_stack(b_cols) if b_cols else np.zeros((len(prefixes), 0))
    eps = _shift_epsilon(values, float(cutpoint))
    shifted = float(cutpoint) + eps
    return RealizationMatrix(values - shifted, pfa.states, "pfa", eps, shifted)


def quantum_realization(moqfa: MOQFA, cutpoint, prefixes, suffixes) -> RealizationMatrix:
    """Rank-n^2 realization of a measure-once automaton's sign pattern:
    the acceptance grid shifted just past the cutpoint."""
    values = acceptance_grid(moqfa, prefixes, suffixes)
    eps = _shift_epsilon(values, float(cutpoint))
    shifted = float(cutpoint) + eps
    bound = moqfa.dim ** 2
    return RealizationMatrix(values - shifted, bound, "quantum", eps, shifted)


def singular_values(matrix) -> np.ndarray:
    mat = np.asarray(matrix, dtype=np.float64)
    if mat.size == 0:
        return np.zeros(0)
    return np.linalg.svd(mat, compute_uv=False)


def numerical_rank(matrix, rel_tol: float = TAU_RANK) -> int:
    """Count of singular values above rel_tol times the largest."""
    if isinstance(matrix, RealizationMatrix):
        matrix = matrix.matrix
    sv = singular_values(matrix)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > rel_tol * sv[0]))


def spectral_norm(sign) -> float:
    """Largest singular value of a sign matrix (or any real matrix)."""
    arr = sign.signs if isinstance(sign, SignMatrix) else sign
    sv = singular_values(arr)
    return float(sv[0]) if sv.size else 0.0


@dataclass(frozen=True)
class ForsterCertificate:
    """Square spectral certificate: sign-rank >= side / spectral_norm,
    which can never exceed cap = sqrt(side)."""

    side: int
    spectral_norm: float
    bound: float
    cap: float


def forster_bound(sign: SignMatrix | np.ndarray) -> ForsterCertificate:
    """Spectral sign-rank bound for a square sign matrix.

    Rectangular input is rejected: the certificate is defined for square
    matrices only, so extract a square restriction first (see
    square_restriction).
    """
    arr = sign.signs if isinstance(sign, SignMatrix) else np.asarray(sign)
    rows, cols = arr.shape
    if rows != cols:
        raise ValueError(
            f"the spectral certificate needs a square sign matrix, got {rows} x {cols}; "
            "extract a square restriction first")
    norm = spectral_norm(arr)
    return ForsterCertificate(rows, norm, rows / norm, float(np.sqrt(rows)))


def square_restriction(sign: SignMatrix, size: int | None = None) -> SignMatrix:
    """Leading size x size corner of a sign matrix (default: largest square)."""
    rows, cols = sign.shape
    if size is None:
        size = min(rows, cols)
    if size < 1 or size > min(rows, cols):
        raise ValueError(f"size must be between 1 and {min(rows, cols)}")
    return SignMatrix(sign.row_labels[:size], sign.col_labels[:size],
                      sign.signs[:size, :size])


def orthant_certificate(realization, d: int | None = None) -> bool:
    """Check a realization paired with the complete shattering pattern.

    True iff every column lies strictly inside the open orthant its sign
    pattern prescribes and the numerical rank equals d.
    """
    mat = realization.matrix if isinstance(realization, RealizationMatrix) else np.asarray(realization, dtype=float)
    rows, cols = mat.shape
    if d is None:
        d = rows
    if rows != d or cols != 2 ** d:
        raise ValueError(f"expected a {d} x {2 ** d} matrix paired with the "
                         f"complete shattering pattern, got {rows} x {cols}")
    pattern = complete_shattering(d).signs
    if not np.all(pattern * mat > 0):
        return False
    return numerical_rank(mat) == d


def sign_matrix_to_json(sign: SignMatrix) -> dict:
    return {
        "format": SIGN_FORMAT_VERSION,
        "kind": "sign_matrix",
        "rows": [list(w) for w in sign.row_labels],
        "cols": [list(w) for w in sign.col_labels],
        "signs": sign.signs.tolist(),
    }


def sign_matrix_from_json(doc: dict) -> SignMatrix:
    if doc.get("kind") != "sign_matrix" or doc.get("format") != SIGN_FORMAT_VERSION:
        raise ValueError("not a sign-matrix document")
    return SignMatrix(
        tuple(tuple(w) for w in doc["rows"]),
        tuple(tuple(w) for w in doc["cols"]),
        np.array(doc["signs"], dtype=np.int8),
    )


def save_sign_matrix(path, sign: SignMatrix) -> None:
    Path(path).write_text(json.dumps(sign_matrix_to_json(sign), indent=2, sort_keys=True) + "\n")


def load_sign_matrix(path) -> SignMatrix:
    return sign_matrix_from_json(json.loads(Path(path).read_text()))


def write_sign_matrix_csv(path, sign: SignMatrix) -> None:
    """CSV with +1/-1 literals; first row/column carry the word labels."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + [" ".join(w) for w in sign.col_labels])
        for label, row in zip(sign.row_labels, sign.signs):
            writer.writerow([" ".join(label)] + [f"{int(v):+d}" for v in row])
