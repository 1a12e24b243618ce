"""JSON serialization for automata (schema version 1).

One document per automaton: {"format": 1, "model": ..., "alphabet": [...],
model-specific fields}.  Real matrices are arrays of row arrays; complex
entries are two-element [re, im] arrays; exact rationals are "p/q" strings.
Unknown top-level keys (e.g. witness metadata) are preserved by loaders
that return the raw document.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .automata import EXACT_MODE, FLOAT_MODE, GFA, MOQFA, PFA, QCFA
from .opcore import KrausChannel

FORMAT_VERSION = 1


def _scalar_out(x, mode: str):
    if mode == EXACT_MODE:
        return str(Fraction(x))
    return float(x)


def _vector_out(vec, mode: str) -> list:
    return [_scalar_out(x, mode) for x in vec]


def _matrix_out(mat, mode: str) -> list:
    return [_vector_out(row, mode) for row in mat]


def _complex_out(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _cvector_out(vec) -> list:
    return [_complex_out(z) for z in vec]


def _cmatrix_out(mat) -> list:
    return [_cvector_out(row) for row in mat]


def _cvector_in(data) -> np.ndarray:
    return np.array([complex(re, im) for re, im in data], dtype=np.complex128)


def _cmatrix_in(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data],
                    dtype=np.complex128)


def automaton_to_json(automaton) -> dict:
    """JSON-ready document for any of the four automaton models."""
    if isinstance(automaton, GFA):
        mode = automaton.scalar_mode
        return {
            "format": FORMAT_VERSION,
            "model": "gfa",
            "alphabet": list(automaton.alphabet),
            "scalar_mode": mode,
            "states": automaton.states,
            "initial": _vector_out(automaton.initial, mode),
            "transitions": {s: _matrix_out(m, mode) for s, m in automaton.transitions.items()},
            "final": _vector_out(automaton.final, mode),
        }
    if isinstance(automaton, PFA):
        mode = automaton.scalar_mode
        return {
            "format": FORMAT_VERSION,
            "model": "pfa",
            "alphabet": list(automaton.alphabet),
            "scalar_mode": mode,
            "states": automaton.states,
            "initial": _vector_out(automaton.initial, mode),
            "transitions": {s: _matrix_out(m, mode) for s, m in automaton.transitions.items()},
            "end_marker": _matrix_out(automaton.end_marker, mode),
            "accepting": sorted(automaton.accepting),
        }
    if isinstance(automaton, MOQFA):
        return {
            "format": FORMAT_VERSION,
            "model": "moqfa",
            "alphabet": list(automaton.alphabet),
            "dim": automaton.dim,
            "initial_state": _cvector_out(automaton.initial_state),
            "unitaries": {s: _cmatrix_out(u) for s, u in automaton.unitaries.items()},
            "accept": _cmatrix_out(automaton.accept),
        }
    if isinstance(automaton, QCFA):
        return {
            "format": FORMAT_VERSION,
            "model": "qcfa",
            "alphabet": list(automaton.alphabet),
            "classical_states": automaton.classical_states,
            "quantum_dim": automaton.quantum_dim,
            "initial_classical": automaton.initial_classical,
            "initial_quantum": _cmatrix_out(automaton.initial_quantum),
            "delta": [
                {"state": s, "symbol": sym, "next": nxt}
                for (s, sym), nxt in sorted(automaton.delta.items())
            ],
            "channels": [
                {"state": s, "symbol": sym, "kraus": [_cmatrix_out(k) for k in chan.kraus]}
                for (s, sym), chan in sorted(automaton.channels.items())
            ],
            "accept": _cmatrix_out(automaton.accept),
        }
    raise TypeError(f"not an automaton: {type(automaton).__name__}")


def automaton_from_json(doc: dict):
    """Rebuild an automaton from its JSON document."""
    if doc.get("format") != FORMAT_VERSION:
        raise ValueError(f"unsupported format version {doc.get('format')!r}")
    model = doc.get("model")
    if model == "gfa":
        mode = doc.get("scalar_mode", FLOAT_MODE)
        return GFA(
            alphabet=tuple(doc["alphabet"]),
            initial=doc["initial"],
            transitions=dict(doc["transitions"]),
            final=doc["final"],
            scalar_mode=mode,
        )
    if model == "pfa":
        mode = doc.get("scalar_mode", FLOAT_MODE)
        return PFA(
            alphabet=tuple(doc["alphabet"]),
            initial=doc["initial"],
            transitions=dict(doc["transitions"]),
            end_marker=doc["end_marker"],
            accepting=frozenset(doc["accepting"]),
            scalar_mode=mode,
        )
    if model == "moqfa":
        return MOQFA(
            alphabet=tuple(doc["alphabet"]),
            initial_state=_cvector_in(doc["initial_state"]),
            unitaries={s: _cmatrix_in(u) for s, u in doc["unitaries"].items()},
            accept=_cmatrix_in(doc["accept"]),
        )
    if model == "qcfa":
        delta = {(int(e["state"]), str(e["symbol"])): int(e["next"]) for e in doc["delta"]}
        channels = {
            (int(e["state"]), str(e["symbol"])): KrausChannel(
                tuple(_cmatrix_in(k) for k in e["kraus"]))
            for e in doc["channels"]
        }
        return QCFA(
            alphabet=tuple(doc["alphabet"]),
            classical_states=int(doc["classical_states"]),
            quantum_dim=int(doc["quantum_dim"]),
            initial_classical=int(doc["initial_classical"]),
            initial_quantum=_cmatrix_in(doc["initial_quantum"]),
            delta=delta,
            channels=channels,
            accept=_cmatrix_in(doc["accept"]),
        )
    raise ValueError(f"unknown model {model!r}")


def save_automaton(path, automaton, extra: dict | None = None) -> None:
    """Write an automaton document, optionally merged with extra top-level
    keys (e.g. a witness_meta section)."""
    doc = automaton_to_json(automaton)
    if extra:
        overlap = set(extra) & set(doc)
        if overlap:
            raise ValueError(f"extra keys collide with the schema: {sorted(overlap)}")
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_document(path) -> dict:
    return json.loads(Path(path).read_text())


def load_automaton(path):
    return automaton_from_json(load_document(path))
