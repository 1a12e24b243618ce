"""Command-line front end.

Subcommands expose each stage for shell pipelines via file handoff
(simulate, linearize, stochasticize, signmatrix), plus the orchestrated
witness, pipeline, and analyze commands.  Reports are JSON-first with CSV
for matrices; the report path also renders matplotlib figures next to the
delimited output unless --no-figures is given.

Exit codes: 0 success and verified, 1 verification failure, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import sys
import time
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from .automata import (
    EXACT_MODE,
    FLOAT_MODE,
    GFA,
    MOQFA,
    QCFA,
    acceptance_grid,
    evaluate,
    member,
)
from .linearize import moqfa_to_gfa, qcfa_to_gfa
from .opcore import TAU_EQ, TAU_RANK
from .serialize import automaton_from_json, load_document, save_automaton
from .signrank import (
    SignMatrix,
    complete_shattering,
    forster_bound,
    load_sign_matrix,
    numerical_rank,
    orthant_certificate,
    save_sign_matrix,
    sign_consistent,
    sign_matrix,
    singular_values,
    spectral_norm,
    square_restriction,
    write_sign_matrix_csv,
)
from .stochasticize import gfa_to_pfa, verify_sign_agreement
from .witnesses import (
    EtaMode,
    build_moqfa_witness,
    build_qcfa_witness,
    test_symbol,
    verify_moqfa_expansion,
    verify_shattering,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

_WORD_LIMIT = 200_000


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True,
                               default=_json_default) + "\n")


def _envelope(args, command: str) -> dict:
    return {
        "command": command,
        "seed": args.seed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _tolerances(args) -> dict:
    tols = {"tau_eq": TAU_EQ, "tau_rank": TAU_RANK}
    for item in args.tol:
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"--tol expects KEY=VAL, got {item!r}")
        if key not in tols:
            raise ValueError(f"unknown tolerance {key!r}; known: {sorted(tols)}")
        tols[key] = float(val)
    return tols


def _parse_cutpoint(text: str, exact: bool):
    value = Fraction(text)
    return value if exact else float(value)


def _parse_word_line(line: str) -> tuple[str, ...] | None:
    stripped = line.strip()
    if not stripped:
        return None
    if stripped == "-":
        return ()
    return tuple(stripped.split())


def _read_words_file(path) -> list[tuple[str, ...]]:
    words = []
    for line in Path(path).read_text().splitlines():
        word = _parse_word_line(line)
        if word is not None:
            words.append(word)
    return words


def _enumerate_words(alphabet, max_len: int) -> list[tuple[str, ...]]:
    total = sum(len(alphabet) ** l for l in range(max_len + 1))
    if total > _WORD_LIMIT:
        raise ValueError(
            f"enumeration of {total} words exceeds the limit {_WORD_LIMIT}; "
            "restrict the alphabet or the length")
    words = []
    for length in range(max_len + 1):
        words.extend(itertools.product(alphabet, repeat=length))
    return words


def _signs_from_values(values: np.ndarray, cutpoint, tol: float) -> np.ndarray:
    # mirrors member(): +1 only when the value clears the ambiguity band
    diffs = np.asarray(values, dtype=float) - float(cutpoint)
    return np.where(diffs >= tol, 1, -1).astype(np.int8)


def _maybe_figures(args) -> bool:
    return not args.no_figures


def _witness_meta(bundle, mode: EtaMode) -> dict:
    meta = {
        "d": bundle.d,
        "t": bundle.t,
        "eta_mode": {"kind": mode.kind, "count": mode.count, "seed": mode.seed},
        "eta_count": len(bundle.etas),
    }
    if hasattr(bundle, "m_bound"):
        meta["kind"] = "qcfa"
        meta["m_bound"] = bundle.m_bound
        meta["c"] = bundle.automaton.classical_states
        meta["q"] = bundle.automaton.quantum_dim
    else:
        meta["kind"] = "moqfa"
        meta["n"] = bundle.n
        meta["r"] = bundle.r
        meta["s"] = bundle.s
    return meta


def _build_witness(args):
    mode = EtaMode.parse(args.eta, seed=args.seed)
    if args.kind == "qcfa":
        if args.c is None or args.q is None:
            raise ValueError("witness qcfa needs --c and --q")
        return build_qcfa_witness(args.c, args.q, mode), mode
    if args.n is None:
        raise ValueError("witness moqfa needs --n")
    return build_moqfa_witness(args.n, mode), mode


def cmd_witness(args) -> int:
    tols = _tolerances(args)
    out = _out_dir(args)
    started = time.perf_counter()
    bundle, mode = _build_witness(args)
    report = verify_shattering(
        bundle.automaton, bundle.prefixes, bundle.suffixes, 0.5,
        bundle.expected_signs(), tol=tols["tau_eq"])
    ok = report.passed
    payload = _envelope(args, f"witness {args.kind}")
    payload["witness_meta"] = _witness_meta(bundle, mode)
    payload["shattering"] = report.to_json_dict()
    payload["shattering"]["passed"] = report.passed
    if args.kind == "moqfa":
        expansion = verify_moqfa_expansion(bundle)
        ok = ok and expansion.passed
        payload["expansion"] = {
            "pairs_checked": expansion.pairs_checked,
            "max_residual": expansion.max_residual,
            "bound": expansion.bound,
            "second_order_shift": expansion.second_order_shift,
            "passed": expansion.passed,
        }
    payload["verified"] = ok

    save_automaton(out / "automaton.json", bundle.automaton,
                   extra={"witness_meta": _witness_meta(bundle, mode)})
    signs = SignMatrix(tuple(bundle.prefixes), tuple(bundle.suffixes),
                       _signs_from_values(report.values, 0.5, tols["tau_eq"]))
    save_sign_matrix(out / "signmatrix.json", signs)
    write_sign_matrix_csv(out / "signs.csv", signs)
    _write_json(out / "shattering_report.json", payload)
    if _maybe_figures(args):
        from . import plots
        plots.save_sign_matrix_figure(signs, out / "sign_matrix.png",
                                      title=f"{args.kind} witness sign pattern")
        plots.save_margin_histogram(report.values, 0.5, out / "margins.png",
                                    title=f"{args.kind} witness margins at cutpoint 1/2")
    elapsed = time.perf_counter() - started
    print(f"witness {args.kind}: {'verified' if ok else 'FAILED'} "
          f"({report.agreements}/{report.pairs_checked} signs, "
          f"min margin {report.min_margin:.3e}, {elapsed:.2f}s)")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_pipeline(args) -> int:
    tols = _tolerances(args)
    out = _out_dir(args)
    started = time.perf_counter()
    bundle, mode = _build_witness(args)
    quantum = bundle.automaton
    if args.kind == "qcfa":
        gfa = qcfa_to_gfa(quantum)
        expected_states = quantum.classical_states * quantum.quantum_dim ** 2
    else:
        gfa = moqfa_to_gfa(quantum)
        expected_states = quantum.dim ** 2
    pfa, conversion = gfa_to_pfa(gfa, 0.5)

    values_q = acceptance_grid(quantum, bundle.prefixes, bundle.suffixes)
    values_p = acceptance_grid(pfa, bundle.prefixes, bundle.suffixes)
    signs_q = _signs_from_values(values_q, 0.5, tols["tau_eq"])
    signs_p = _signs_from_values(values_p, 0.5, tols["tau_eq"])
    grid_agree = bool(np.array_equal(signs_q, signs_p))
    expected = bundle.expected_signs()
    grid_expected = bool(np.array_equal(signs_p, expected))
    margin_p = float(np.abs(values_p - 0.5).min())

    sub = (tuple(args.sub_alphabet.split(",")) if args.sub_alphabet
           else (bundle.prefixes[0][0], test_symbol(bundle.etas[0])))
    for sym in sub:
        if sym not in quantum.alphabet:
            raise ValueError(f"sub-alphabet symbol {sym!r} is not in the alphabet")
    word_mismatches = 0
    words = _enumerate_words(sub, args.max_len)
    for word in words:
        mq = member(evaluate(quantum, word), 0.5, tols["tau_eq"])
        mp = member(evaluate(pfa, word), 0.5, tols["tau_eq"])
        word_mismatches += mq.sign != mp.sign

    counts_ok = (gfa.states == expected_states
                 and pfa.states == 2 * expected_states + 6
                 and pfa.states >= bundle.d)
    ok = counts_ok and grid_agree and grid_expected and word_mismatches == 0

    payload = _envelope(args, f"pipeline {args.kind}")
    payload["witness_meta"] = _witness_meta(bundle, mode)
    payload["state_counts"] = {
        "gfa_states": gfa.states,
        "gfa_states_expected": expected_states,
        "pfa_states": pfa.states,
        "pfa_states_bound": 2 * expected_states + 6,
        "lower_bound_d": bundle.d,
        "counts_ok": counts_ok,
    }
    payload["witness_grid"] = {
        "pairs": int(values_q.size),
        "signs_agree": grid_agree,
        "signs_match_expected": grid_expected,
        "pfa_min_margin": margin_p,
    }
    payload["word_check"] = {
        "sub_alphabet": list(sub),
        "max_len": args.max_len,
        "words_checked": len(words),
        "mismatches": word_mismatches,
    }
    payload["conversion"] = {
        "input_states": conversion.input_states,
        "output_states": conversion.output_states,
        "shift": conversion.shift,
        "scale": conversion.scale,
        "offset": conversion.offset,
        "final_scale": conversion.final_scale,
        "block_mass": conversion.block_mass,
    }
    payload["verified"] = ok

    save_automaton(out / "witness_automaton.json", quantum,
                   extra={"witness_meta": _witness_meta(bundle, mode)})
    save_automaton(out / "gfa.json", gfa)
    save_automaton(out / "pfa.json", pfa)
    _write_json(out / "pipeline_report.json", payload)
    if _maybe_figures(args):
        from . import plots
        plots.save_margin_histogram(values_p, 0.5, out / "pfa_margins.png",
                                    title="final PFA margins on the witness grid")
        plots.save_sign_matrix_figure(signs_p, out / "pfa_signs.png",
                                      title="final PFA sign pattern")
    elapsed = time.perf_counter() - started
    print(f"pipeline {args.kind}: {'verified' if ok else 'FAILED'} "
          f"(GFA {gfa.states} states, PFA {pfa.states} states, "
          f"min PFA margin {margin_p:.3e}, {elapsed:.2f}s)")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_simulate(args) -> int:
    tols = _tolerances(args)
    out = _out_dir(args)
    doc = load_document(args.automaton)
    automaton = automaton_from_json(doc)
    if args.word:
        words = [_parse_word_line(w) or () for w in args.word]
    elif args.words_file:
        words = _read_words_file(args.words_file)
    elif args.max_len is not None:
        words = _enumerate_words(automaton.alphabet, args.max_len)
    else:
        raise ValueError("simulate needs --word, --words-file, or --max-len")
    exact = getattr(automaton, "scalar_mode", FLOAT_MODE) == EXACT_MODE
    cutpoint = None
    if args.cutpoint is not None:
        cutpoint = _parse_cutpoint(args.cutpoint, exact)
    rows = []
    for word in words:
        value = evaluate(automaton, word)
        row = {"word": " ".join(word), "value": value}
        if cutpoint is not None:
            verdict = member(value, cutpoint, tols["tau_eq"])
            row["sign"] = verdict.sign
            row["ambiguous"] = verdict.ambiguous
        rows.append(row)
    with open(out / "values.csv", "w", newline="") as fh:
        fields = ["word", "value"] + (["sign", "ambiguous"] if cutpoint is not None else [])
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            record = dict(row)
            record["value"] = str(record["value"]) if exact else repr(float(record["value"]))
            writer.writerow(record)
    payload = _envelope(args, "simulate")
    payload["model"] = doc.get("model")
    payload["words_evaluated"] = len(rows)
    payload["cutpoint"] = cutpoint
    if cutpoint is not None:
        payload["accepted"] = sum(1 for r in rows if r["sign"] > 0)
        payload["ambiguous"] = sum(1 for r in rows if r["ambiguous"])
    _write_json(out / "simulate_report.json", payload)
    if _maybe_figures(args) and rows:
        from . import plots
        values = [float(r["value"]) for r in rows]
        plots.save_value_histogram(values, cutpoint if cutpoint is not None else 0.5,
                                   out / "values.png", title="acceptance values")
    print(f"simulate: evaluated {len(rows)} words")
    return EXIT_OK


def cmd_linearize(args) -> int:
    out = _out_dir(args)
    doc = load_document(args.automaton)
    automaton = automaton_from_json(doc)
    if isinstance(automaton, QCFA):
        gfa = qcfa_to_gfa(automaton)
        source = {"model": "qcfa", "classical_states": automaton.classical_states,
                  "quantum_dim": automaton.quantum_dim}
    elif isinstance(automaton, MOQFA):
        gfa = moqfa_to_gfa(automaton)
        source = {"model": "moqfa", "dim": automaton.dim}
    else:
        raise ValueError("linearize expects a qcfa or moqfa document")
    ok = True
    check = None
    if args.check_len:
        words = _enumerate_words(automaton.alphabet, args.check_len)
        worst = 0.0
        for word in words:
            worst = max(worst, abs(evaluate(automaton, word) - evaluate(gfa, word)))
        ok = worst <= 1e-9
        check = {"max_len": args.check_len, "words": len(words),
                 "max_deviation": worst, "passed": ok}
    save_automaton(out / "gfa.json", gfa)
    payload = _envelope(args, "linearize")
    payload["source"] = source
    payload["gfa_states"] = gfa.states
    payload["equivalence_check"] = check
    _write_json(out / "linearize_report.json", payload)
    print(f"linearize: {source['model']} -> GFA with {gfa.states} states")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_stochasticize(args) -> int:
    tols = _tolerances(args)
    out = _out_dir(args)
    automaton = automaton_from_json(load_document(args.automaton))
    if not isinstance(automaton, GFA):
        raise ValueError("stochasticize expects a gfa document")
    if args.exact and automaton.scalar_mode == FLOAT_MODE:
        automaton = GFA(
            alphabet=automaton.alphabet,
            initial=[Fraction(x) for x in automaton.initial],
            transitions={s: [[Fraction(x) for x in row] for row in m]
                         for s, m in automaton.transitions.items()},
            final=[Fraction(x) for x in automaton.final],
            scalar_mode=EXACT_MODE,
        )
    exact = automaton.scalar_mode == EXACT_MODE
    cutpoint = _parse_cutpoint(args.cutpoint, exact)
    pfa, conversion = gfa_to_pfa(automaton, cutpoint)
    half = Fraction(1, 2) if exact else 0.5
    payload = _envelope(args, "stochasticize")
    payload["conversion"] = {
        "input_states": conversion.input_states,
        "output_states": conversion.output_states,
        "shift": conversion.shift,
        "scale": conversion.scale,
        "offset": conversion.offset,
        "final_scale": conversion.final_scale,
        "block_mass": conversion.block_mass,
        "cutpoint_in": cutpoint,
        "cutpoint_out": half,
    }
    ok = True
    if args.verify_len:
        agreement = verify_sign_agreement(automaton, cutpoint, pfa, half,
                                          args.verify_len, tol=tols["tau_eq"])
        ok = agreement.agree
        payload["agreement"] = {
            "max_len": args.verify_len,
            "words_checked": agreement.words_checked,
            "agree": agreement.agree,
            "disagreements": agreement.disagreement_count,
            "first_disagreement": (" ".join(agreement.first_disagreement)
                                   if agreement.first_disagreement else None),
            "min_margin": agreement.min_margin,
            "ambiguous": agreement.ambiguous_count,
        }
    save_automaton(out / "pfa.json", pfa)
    _write_json(out / "conversion_report.json", payload)
    if _maybe_figures(args) and args.verify_len:
        from . import plots
        words = _enumerate_words(automaton.alphabet, args.verify_len)
        values = [float(evaluate(pfa, w)) for w in words]
        plots.save_margin_histogram(values, 0.5, out / "pfa_margins.png",
                                    title="PFA margins at cutpoint 1/2")
    print(f"stochasticize: {conversion.input_states} -> {conversion.output_states} states"
          + ("" if ok else " (sign agreement FAILED)"))
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_signmatrix(args) -> int:
    tols = _tolerances(args)
    out = _out_dir(args)
    doc = load_document(args.automaton)
    automaton = automaton_from_json(doc)
    exact = getattr(automaton, "scalar_mode", FLOAT_MODE) == EXACT_MODE
    cutpoint = _parse_cutpoint(args.cutpoint, exact)
    if args.prefixes:
        prefixes = _read_words_file(args.prefixes)
    elif "witness_meta" in doc:
        d = int(doc["witness_meta"]["d"])
        prefixes = [(f"p:{i + 1}",) for i in range(d)]
    else:
        raise ValueError("signmatrix needs --prefixes (no witness metadata found)")
    if args.suffixes:
        suffixes = _read_words_file(args.suffixes)
    elif "witness_meta" in doc:
        suffixes = [(sym,) for sym in automaton.alphabet if sym.startswith("tau:")]
    else:
        raise ValueError("signmatrix needs --suffixes (no witness metadata found)")
    matrix = sign_matrix(automaton, cutpoint, prefixes, suffixes, tol=tols["tau_eq"])
    save_sign_matrix(out / "signmatrix.json", matrix)
    write_sign_matrix_csv(out / "signs.csv", matrix)
    payload = _envelope(args, "signmatrix")
    payload["shape"] = list(matrix.shape)
    payload["cutpoint"] = cutpoint
    _write_json(out / "signmatrix_report.json", payload)
    if _maybe_figures(args):
        from . import plots
        plots.save_sign_matrix_figure(matrix, out / "sign_matrix.png")
    print(f"signmatrix: {matrix.shape[0]} x {matrix.shape[1]} pattern written")
    return EXIT_OK


def _load_realization_matrix(path) -> np.ndarray:
    p = Path(path)
    if p.suffix.lower() == ".json":
        doc = json.loads(p.read_text())
        return np.asarray(doc["matrix"], dtype=float)
    with open(p, newline="") as fh:
        rows = [[float(x) for x in row] for row in csv.reader(fh) if row]
    return np.asarray(rows, dtype=float)


def cmd_analyze(args) -> int:
    tols = _tolerances(args)
    out = _out_dir(args)
    matrix = load_sign_matrix(args.signmatrix)
    rows, cols = matrix.shape
    payload = _envelope(args, "analyze")
    payload["shape"] = [rows, cols]
    payload["spectral_norm"] = spectral_norm(matrix)
    if rows == cols:
        cert = forster_bound(matrix)
        payload["forster"] = {
            "side": cert.side,
            "bound": cert.bound,
            "cap": cert.cap,
            "log2_bound": math.log2(cert.bound) if cert.bound > 0 else None,
        }
    else:
        if args.forster:
            raise ValueError(
                "the spectral certificate needs a square sign matrix "
                f"({rows} x {cols} given); use --square SIZE to restrict first")
        payload["forster"] = None
    if args.square:
        restricted = square_restriction(matrix, args.square)
        cert = forster_bound(restricted)
        save_sign_matrix(out / "square_restriction.json", restricted)
        payload["square_restriction"] = {
            "side": cert.side,
            "spectral_norm": cert.spectral_norm,
            "bound": cert.bound,
            "cap": cert.cap,
        }
    ok = True
    sv = None
    if args.realization:
        real = _load_realization_matrix(args.realization)
        if real.shape != matrix.shape:
            raise ValueError(
                f"realization shape {real.shape} does not match sign matrix {matrix.shape}")
        consistent = sign_consistent(real, matrix)
        rank = numerical_rank(real, rel_tol=tols["tau_rank"])
        sv = singular_values(real)
        info = {
            "numerical_rank": rank,
            "log2_rank": math.log2(rank) if rank > 0 else None,
            "sign_consistent": consistent,
            "singular_values": sv,
        }
        if cols == 2 ** rows and np.array_equal(matrix.signs, complete_shattering(rows).signs):
            info["orthant_certificate"] = orthant_certificate(real, rows)
            ok = ok and info["orthant_certificate"]
        payload["realization"] = info
        ok = ok and consistent
        with open(out / "singular_values.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "singular_value"])
            for i, val in enumerate(sv):
                writer.writerow([i + 1, repr(float(val))])
    _write_json(out / "analysis.json", payload)
    if _maybe_figures(args):
        from . import plots
        spectrum = sv if sv is not None else singular_values(matrix.signs)
        plots.save_singular_values_figure(spectrum, out / "singular_values.png",
                                          rel_tol=tols["tau_rank"])
    print(f"analyze: spectral norm {payload['spectral_norm']:.6g}"
          + (" (verification FAILED)" if not ok else ""))
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def _add_common(sp) -> None:
    sp.add_argument("--out", default="qfasim_out", help="output directory")
    sp.add_argument("--seed", type=int, default=0, help="seed recorded in reports")
    sp.add_argument("--tol", action="append", default=[], metavar="KEY=VAL",
                    help="override a tolerance (tau_eq, tau_rank)")
    sp.add_argument("--no-figures", action="store_true",
                    help="skip rendering figures")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfasim",
        description="Quantum finite automata under strict cutpoints: witnesses, "
                    "linearization, stochasticization, and sign-rank certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("witness", help="build and verify a witness automaton")
    sp.add_argument("kind", choices=["qcfa", "moqfa"])
    sp.add_argument("--c", type=int, help="classical state count (qcfa)")
    sp.add_argument("--q", type=int, help="quantum register dimension (qcfa)")
    sp.add_argument("--n", type=int, help="register dimension (moqfa)")
    sp.add_argument("--eta", default="full", help="'full' or 'sample:N'")
    _add_common(sp)
    sp.set_defaults(handler=cmd_witness)

    sp = sub.add_parser("pipeline",
                        help="witness -> GFA -> PFA with end-to-end verification")
    sp.add_argument("kind", choices=["qcfa", "moqfa"])
    sp.add_argument("--c", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--eta", default="full")
    sp.add_argument("--max-len", type=int, default=3,
                    help="word length for the sub-alphabet check")
    sp.add_argument("--sub-alphabet", default=None,
                    help="comma-separated symbols for the word check")
    _add_common(sp)
    sp.set_defaults(handler=cmd_pipeline)

    sp = sub.add_parser("simulate", help="evaluate words against an automaton file")
    sp.add_argument("automaton", help="automaton JSON document")
    sp.add_argument("--word", action="append",
                    help="word as space-separated symbols ('-' for the empty word)")
    sp.add_argument("--words-file", help="file with one word per line")
    sp.add_argument("--max-len", type=int, default=None,
                    help="enumerate all words up to this length")
    sp.add_argument("--cutpoint", default=None, help="strict cutpoint (e.g. 1/2)")
    _add_common(sp)
    sp.set_defaults(handler=cmd_simulate)

    sp = sub.add_parser("linearize", help="linearize a quantum automaton to a GFA")
    sp.add_argument("automaton", help="qcfa or moqfa JSON document")
    sp.add_argument("--check-len", type=int, default=0,
                    help="verify equivalence on all words up to this length")
    _add_common(sp)
    sp.set_defaults(handler=cmd_linearize)

    sp = sub.add_parser("stochasticize",
                        help="convert a GFA with a cutpoint to a PFA at cutpoint 1/2")
    sp.add_argument("automaton", help="gfa JSON document")
    sp.add_argument("--cutpoint", required=True, help="strict cutpoint (e.g. 1/2)")
    sp.add_argument("--exact", action="store_true",
                    help="run in exact rational arithmetic")
    sp.add_argument("--verify-len", type=int, default=0,
                    help="verify sign agreement on all words up to this length")
    _add_common(sp)
    sp.set_defaults(handler=cmd_stochasticize)

    sp = sub.add_parser("signmatrix",
                        help="sign matrix of an automaton over prefix/suffix sets")
    sp.add_argument("automaton", help="automaton JSON document")
    sp.add_argument("--cutpoint", required=True)
    sp.add_argument("--prefixes", help="file with one prefix word per line")
    sp.add_argument("--suffixes", help="file with one suffix word per line")
    _add_common(sp)
    sp.set_defaults(handler=cmd_signmatrix)

    sp = sub.add_parser("analyze", help="spectral and rank analysis of a sign matrix")
    sp.add_argument("signmatrix", help="sign matrix JSON document")
    sp.add_argument("--realization", default=None,
                    help="matrix file (JSON with 'matrix' or CSV) realizing the signs")
    sp.add_argument("--forster", action="store_true",
                    help="require the square spectral certificate")
    sp.add_argument("--square", type=int, default=None,
                    help="also analyze the leading SIZE x SIZE restriction")
    _add_common(sp)
    sp.set_defaults(handler=cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if exc.code is not None else 0
        return int(code)
    try:
        return args.handler(args)
    except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
