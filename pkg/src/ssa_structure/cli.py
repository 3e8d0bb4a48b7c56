"""Command-line entry point: ``ssa-structure {gen,check,decompose,channel,selftest}``.

Exit codes: 0 ok, 1 input error, 2 not saturated, 3 verification failure,
4 internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import generators as gen
from . import io
from .channels import (
    KrausChannel,
    average_entropy_report,
    dephasing_channel,
    depolarizing_channel,
    exchange_bound_report,
    identity_channel,
    unitary_channel,
)
from .errors import NotSaturatedError, RefinementExhaustedError, StructureError, StructureVerificationError
from .states import SATURATION_TOL, MultipartiteState, araki_lieb_gap, bi_ssa_gap, ghz, ssa_gap_v1, ssa_gap_v2
from .structure import (
    araki_lieb_decompose,
    bi_ssa_report,
    channel_saturation_analyze,
    coherent_saturation_check,
    holevo_saturation_analyze,
    markov_decompose,
    theorem1_decompose,
)
from .structure.markov import MATRIX_TOL

EXIT_OK, EXIT_INPUT, EXIT_NOT_SATURATED, EXIT_VERIFICATION, EXIT_INTERNAL = 0, 1, 2, 3, 4

STATE_FAMILIES = ("random", "ghz", "markov", "theorem1", "araki-lieb", "bi-ssa", "diag", "ket", "scramble")
CHANNEL_FAMILIES = ("random-channel", "dephasing", "depolarizing", "unitary", "identity", "mixture")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- argument helpers

def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _pairs(text: str) -> list[tuple[int, int]]:
    """'2x2,1x2' -> [(2, 2), (1, 2)]"""
    out = []
    for item in text.split(","):
        l, _, r = item.strip().partition("x")
        out.append((int(l), int(r)))
    return out


def _matrix(text: str) -> np.ndarray:
    """'0.6,0;0,0.4' -> 2x2 array."""
    return np.array([_floats(row) for row in text.split(";")])


def _sectors(text: str) -> dict[tuple[int, int], int]:
    """'0,0:0;1,1:1' -> {(0, 0): 0, (1, 1): 1}"""
    out = {}
    for item in text.split(";"):
        cell, _, k = item.partition(":")
        i, j = _ints(cell)
        out[(i, j)] = int(k)
    return out


def _labels(text: str) -> list[str]:
    return [x for x in text.split(",") if x]


# ---------------------------------------------------------------- gen

def _gen_state(a) -> tuple[MultipartiteState, dict]:
    fam = a.family
    params: dict = {}
    planted: dict = {}
    if fam == "random":
        dims = _ints(a.dims)
        st = gen.random_state(dims, seed=a.seed, rank=a.rank)
        params = {"dims": dims, "rank": a.rank}
    elif fam == "ghz":
        st = ghz(a.n)
        params = {"n": a.n}
    elif fam == "markov":
        blocks = _pairs(a.blocks)
        w = _floats(a.weights) if a.weights else gen.random_weights(len(blocks), a.seed).tolist()
        spec = gen.BlockSpec(tuple((l, r, x) for (l, r), x in zip(blocks, w)), a.dim_a, a.dim_c)
        st, dec = gen.planted_markov(spec, a.seed)
        params = {"blocks": [list(b) for b in blocks], "weights": w, "dim_A": a.dim_a, "dim_C": a.dim_c}
        planted = {"B": [list(d) for d in dec.dims()]}
    elif fam == "theorem1":
        ab, cb = _pairs(a.a_blocks), _pairs(a.c_blocks)
        mu = _matrix(a.mu) if a.mu else np.diag(gen.random_weights(len(ab), a.seed))
        st, adec, cdec = gen.planted_theorem1(mu, ab, cb, a.dim_b, a.seed)
        params = {"a_blocks": [list(b) for b in ab], "c_blocks": [list(b) for b in cb],
                  "mu": mu.tolist(), "dim_B": a.dim_b}
        planted = {"A": [list(d) for d in adec.dims()], "C": [list(d) for d in cdec.dims()]}
    elif fam == "araki-lieb":
        st = gen.planted_araki_lieb(a.dim_l, a.dim_r, a.dim_c, seed=a.seed)
        params = {"dim_L": a.dim_l, "dim_R": a.dim_r, "dim_C": a.dim_c}
        planted = {"B": [[a.dim_l, a.dim_r]]}
    elif fam == "bi-ssa":
        ab, bb = _pairs(a.a_blocks), _pairs(a.b_blocks)
        p = _matrix(a.p)
        sectors = _sectors(a.sectors)
        st = gen.planted_bi_ssa(p, ab, bb, sectors, a.dim_c, a.seed)
        params = {"p": p.tolist(), "a_blocks": [list(b) for b in ab], "b_blocks": [list(b) for b in bb],
                  "sectors": [[i, j, k] for (i, j), k in sorted(sectors.items())], "dim_C": a.dim_c}
        planted = {"sectors": len(set(sectors.values()))}
    elif fam == "diag":
        probs = _floats(a.probs)
        st = MultipartiteState(np.diag(np.asarray(probs, dtype=np.complex128)), (len(probs),), ("A",))
        params = {"probs": probs}
    elif fam == "ket":
        amps = np.asarray(_floats(a.amps), dtype=np.complex128)
        amps = amps / np.linalg.norm(amps)
        st = MultipartiteState.from_ket(amps, (amps.size,), ("A",))
        params = {"amps": _floats(a.amps)}
    elif fam == "scramble":
        if not a.input:
            raise UsageError("gen scramble needs --input")
        st = io.load_state(a.input)
        params = {"source": io.state_provenance(a.input)}
        if not a.scramble:
            raise UsageError("gen scramble needs --scramble LABELS")
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown family {fam}")
    prov = {"family": fam, "seed": a.seed, "params": params}
    if planted:
        prov["planted"] = planted
    if a.scramble:
        labels = _labels(a.scramble)
        missing = [x for x in labels if x not in st.labels]
        if missing:
            raise UsageError(f"unknown labels to scramble: {missing}")
        st = gen.scramble_local(st, labels, seed=a.seed)
        prov["scrambled"] = labels
    return st, prov


def _gen_channel(a) -> tuple[KrausChannel, dict]:
    fam = a.family
    if fam == "random-channel":
        phi = gen.random_channel(a.d_in, a.d_out, a.n_kraus, seed=a.seed)
        params = {"d_in": a.d_in, "d_out": a.d_out, "n_kraus": a.n_kraus}
    elif fam == "dephasing":
        phi = dephasing_channel(a.d)
        params = {"d": a.d}
    elif fam == "depolarizing":
        phi = depolarizing_channel()
        params = {}
    elif fam == "unitary":
        phi = unitary_channel(gen.haar_unitary(a.d, a.seed))
        params = {"d": a.d}
    elif fam == "identity":
        phi = identity_channel(a.d)
        params = {"d": a.d}
    else:  # mixture: {sqrt(t) I, sqrt(1-t) I}
        t = a.t
        phi = KrausChannel((np.sqrt(t) * np.eye(a.d), np.sqrt(1 - t) * np.eye(a.d)))
        params = {"d": a.d, "t": t}
    return phi, {"family": fam, "seed": a.seed, "params": params}


def cmd_gen(a) -> tuple[int, str]:
    if a.family in CHANNEL_FAMILIES:
        phi, prov = _gen_channel(a)
        return EXIT_OK, io.dumps(io.channel_document(phi, prov))
    st, prov = _gen_state(a)
    return EXIT_OK, io.dumps(io.state_document(st, prov))


# ---------------------------------------------------------------- check / decompose / channel

def _tolerances(a) -> dict:
    return {"entropy_bits": a.tol, "matrix_trace_norm": MATRIX_TOL}


def _provenance(a, *sources) -> dict:
    prov = {"command": a.command, "seed": a.seed}
    prov["inputs"] = [io._load_json(s).get("provenance") for s in sources]
    return prov


def cmd_check(a) -> tuple[int, str]:
    st = io.load_state(a.state)
    checks = {
        "ssa1": (3, ssa_gap_v1),
        "ssa2": (3, ssa_gap_v2),
        "bi-ssa": (3, bi_ssa_gap),
        "araki-lieb": (2, araki_lieb_gap),
    }
    if a.which == "all":
        names = [k for k, (n, _) in checks.items() if n == st.arity]
        if not names:
            raise UsageError(f"no identity applies to a state with {st.arity} subsystems")
    else:
        names = [a.which]
        need = checks[a.which][0]
        if st.arity != need:
            raise UsageError(f"{a.which} needs {need} subsystems, state has {st.arity}")
    gaps = [io.gap_payload(checks[n][1](st, a.tol)) for n in names]
    doc = io.report_document("gap", {"gaps": gaps}, _tolerances(a), _provenance(a, a.state))
    return EXIT_OK, io.dumps(doc)


_DECOMPOSERS = {
    "markov": ("markov", 3, markov_decompose, io.markov_payload),
    "thm1": ("theorem1", 3, theorem1_decompose, io.theorem1_payload),
    "araki-lieb": ("araki_lieb", 2, araki_lieb_decompose, io.araki_lieb_payload),
    "bi-ssa": ("bi_ssa", 3, bi_ssa_report, io.bi_ssa_payload),
}


def _failure(e: StructureError) -> dict:
    rec = {"type": type(e).__name__, "message": str(e)}
    for attr in ("identity", "gap_bits", "residual", "worst_eigenvalue", "depth"):
        if hasattr(e, attr):
            rec[attr] = getattr(e, attr)
    return rec


def cmd_decompose(a) -> tuple[int, str]:
    st = io.load_state(a.state)
    kind, arity, fn, payload = _DECOMPOSERS[a.mode]
    if st.arity != arity:
        raise UsageError(f"mode {a.mode} needs {arity} subsystems, state has {st.arity}")
    code = EXIT_OK
    try:
        body = {"saturated": True, "structure": payload(fn(st, a.tol))}
    except NotSaturatedError as e:
        body, code = {"saturated": False, "failure": _failure(e)}, EXIT_NOT_SATURATED
    except (StructureVerificationError, RefinementExhaustedError) as e:
        body, code = {"saturated": True, "failure": _failure(e)}, EXIT_VERIFICATION
    doc = io.report_document(kind, body, _tolerances(a), _provenance(a, a.state))
    return code, io.dumps(doc)


def cmd_channel(a) -> tuple[int, str]:
    phi = io.load_channel(a.channel)
    st = io.load_state(a.state)
    if st.dim != phi.dim_in:
        raise UsageError(f"state dimension {st.dim} does not match channel input {phi.dim_in}")
    rho = st.matrix
    code = EXIT_OK
    if a.analyze == "saturation":
        kind, body = "channel_saturation", io.channel_saturation_payload(channel_saturation_analyze(phi, rho, a.tol))
    elif a.analyze == "average-entropy":
        sat = channel_saturation_analyze(phi, rho, a.tol)
        kind = "gap"
        body = {"gaps": [io.gap_payload(average_entropy_report(phi, rho, a.tol))],
                "saturation": io.channel_saturation_payload(sat)}
    elif a.analyze == "coherent":
        proposed = None
        if a.split:
            dl, dr = _ints(a.split)
            if dl * dr != phi.dim_out:
                raise UsageError(f"split {dl}x{dr} does not match output dimension {phi.dim_out}")
            proposed = (dl, dr, np.eye(phi.dim_out))
        kind, body = "gap", {"gaps": [io.coherent_payload(coherent_saturation_check(phi, rho, proposed, a.tol))]}
    else:
        kind = "holevo_saturation"
        gap = exchange_bound_report(phi, rho, a.tol)
        if gap.saturated:
            try:
                body = {"saturated": True, **io.holevo_saturation_payload(holevo_saturation_analyze(phi, rho, a.tol))}
            except (StructureVerificationError, RefinementExhaustedError) as e:
                body, code = {"saturated": True, "gap": io.gap_payload(gap), "failure": _failure(e)}, EXIT_VERIFICATION
        else:
            body = {"saturated": False, "gap": io.gap_payload(gap)}
    doc = io.report_document(kind, body, _tolerances(a), _provenance(a, a.channel, a.state))
    return code, io.dumps(doc)


# ---------------------------------------------------------------- selftest

def _selftest_cases(seed: int):
    def markov():
        spec = gen.BlockSpec(((2, 2, 0.6), (1, 2, 0.4)), dim_A=2, dim_C=2)
        st, dec = gen.planted_markov(spec, seed)
        r = markov_decompose(gen.scramble_local(st, ["B"], seed + 1))
        return sorted(r.block_dims()) == sorted(dec.dims()) and r.reassembly_error <= MATRIX_TOL

    def theorem1():
        st, adec, cdec = gen.planted_theorem1(np.diag([0.6, 0.4]), [(2, 2), (1, 2)], [(1, 2), (2, 1)], 2, seed)
        r = theorem1_decompose(gen.scramble_local(st, ["A", "C"], seed + 1))
        return sorted(r.a_dims()) == sorted(adec.dims()) and sorted(r.c_dims()) == sorted(cdec.dims())

    def araki_lieb():
        st = gen.scramble_local(gen.planted_araki_lieb(2, 2, seed=seed), ["B"], seed + 1)
        r = araki_lieb_decompose(st)
        return (r.dim_L, r.dim_R) == (2, 2) and r.reassembly_error <= MATRIX_TOL

    def bi_ssa():
        st = gen.planted_bi_ssa(np.diag([0.3, 0.7]), [(1, 2), (2, 1)], [(2, 1), (1, 2)],
                                {(0, 0): 0, (1, 1): 1}, 2, seed)
        return bi_ssa_report(gen.scramble_local(st, ["A", "B"], seed + 1)).n_sectors == 2

    def ghz_gaps():
        g = ghz(3)
        return abs(ssa_gap_v1(g).gap_bits - 1) <= 1e-9 and abs(ssa_gap_v2(g).gap_bits) <= 1e-9

    def holevo():
        r = holevo_saturation_analyze(dephasing_channel(2), np.diag([0.3, 0.7]))
        return r.output_error <= MATRIX_TOL and len(r.output_blocks) == 2

    return [("markov", markov), ("theorem1", theorem1), ("araki_lieb", araki_lieb),
            ("bi_ssa", bi_ssa), ("ghz_gaps", ghz_gaps), ("holevo_dephasing", holevo)]


def cmd_selftest(a) -> tuple[int, str]:
    lines, ok = [], True
    for name, case in _selftest_cases(a.seed):
        try:
            passed = bool(case())
        except StructureError as e:
            passed = False
            name = f"{name} ({e})"
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} {name}")
    return (EXIT_OK if ok else EXIT_VERIFICATION), "\n".join(lines) + "\n"


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=SATURATION_TOL, help="entropy saturation tolerance in bits")
    common.add_argument("--seed", type=int, default=0, help="unsigned 64-bit seed")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--quiet", action="store_true", help="suppress the status line on stderr")

    p = argparse.ArgumentParser(prog="ssa-structure", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a state or channel file")
    g.add_argument("family", choices=STATE_FAMILIES + CHANNEL_FAMILIES)
    g.add_argument("--scramble", metavar="LABELS", help="comma-separated subsystems to hit with local unitaries")
    g.add_argument("--input", help="state file for the scramble family")
    g.add_argument("--dims", default="2,2,2")
    g.add_argument("--rank", type=int)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--blocks", default="2x2,1x2", help="markov B-blocks as LxR list")
    g.add_argument("--weights", help="markov block weights")
    g.add_argument("--dim-a", type=int, default=2)
    g.add_argument("--dim-b", type=int, default=2)
    g.add_argument("--dim-c", type=int, default=2)
    g.add_argument("--dim-l", type=int, default=2)
    g.add_argument("--dim-r", type=int, default=2)
    g.add_argument("--a-blocks", default="2x2,1x2")
    g.add_argument("--b-blocks", default="2x1,1x2")
    g.add_argument("--c-blocks", default="1x2,2x1")
    g.add_argument("--mu", help="joint weights as rows 'a,b;c,d' (default: random diagonal)")
    g.add_argument("--p", default="0.3,0;0,0.7", help="bi-ssa cell weights as rows")
    g.add_argument("--sectors", default="0,0:0;1,1:1", help="bi-ssa sector map 'i,j:k;...'")
    g.add_argument("--probs", default="0.5,0.5")
    g.add_argument("--amps", default="1,1")
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--d-in", type=int, default=2)
    g.add_argument("--d-out", type=int, default=2)
    g.add_argument("--n-kraus", type=int, default=2)
    g.add_argument("--t", type=float, default=0.3)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", parents=[common], help="entropy gaps of a state")
    c.add_argument("state")
    c.add_argument("--which", choices=("ssa1", "ssa2", "araki-lieb", "bi-ssa", "all"), default="all")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("decompose", parents=[common], help="structure of a saturating state")
    d.add_argument("state")
    d.add_argument("--mode", choices=tuple(_DECOMPOSERS), required=True)
    d.set_defaults(func=cmd_decompose)

    ch = sub.add_parser("channel", parents=[common], help="channel entropy bounds and saturation structure")
    ch.add_argument("channel")
    ch.add_argument("state")
    ch.add_argument("--analyze", choices=("holevo", "average-entropy", "coherent", "saturation"), required=True)
    ch.add_argument("--split", help="coherent: output factorization 'L,R' in the standard basis")
    ch.set_defaults(func=cmd_channel)

    s = sub.add_parser("selftest", parents=[common], help="run built-in planted-instance checks")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        code, text = a.func(a)
    except (io.InputError, UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as e:  # noqa: BLE001 - last-resort exit code
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    try:
        if a.out:
            Path(a.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except OSError as e:
        print(f"error: cannot write output ({e.strerror})", file=sys.stderr)
        return EXIT_INPUT
    if not a.quiet:
        status = {0: "ok", 2: "not saturated", 3: "verification failed"}.get(code, str(code))
        print(f"{a.command}: {status}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
