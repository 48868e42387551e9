"""Line-oriented text formats for circuits, Hamiltonians and site tensors.

All three formats share the same conventions: one statement per line, `#`
starts a comment, complex entries are written `re,im`, matrices are listed
row-major after a `:` separator.  Parse errors carry the offending line
number.

Circuit files::

    qubits 2
    h 0
    cnot 0 1
    rz 0.785398 1
    matrix 0 1 : 1,0 0,0 ... (16 entries)

Hamiltonian files::

    dims 2 2 2
    vertex 0 : 1        # graph vertex term, neighbors after the colon
    star 0 1 2 3        # X-type stabilizer projector
    plaquette 0 1 2 3   # Z-type stabilizer projector
    term 0 1 : 1,0 ...  # explicit projector matrix on listed sites

Site-tensor files::

    preset aklt
    sites 4

or explicit tensors::

    d 2
    bond 2
    sites 4
    tensor 0 : 1,0 0,0 0,0 0.5,0
    tensor 1 : 0,0 1,0 0.5,0 0,0
"""

from __future__ import annotations

import numpy as np

from .core import SiteSystem, local_operator, named_gate, pauli_string
from .dqc import Gate, QuantumCircuit
from .dse import FrustrationFreeHamiltonian, GraphSpec, graph_vertex_term
from .mps import MatrixProductState, preset_mps


class InputFormatError(ValueError):
    """Malformed input file; carries the 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            yield lineno, stripped


def _parse_complex(token: str, lineno: int) -> complex:
    parts = token.split(",")
    if len(parts) != 2:
        raise InputFormatError(f"complex entry {token!r} is not 're,im'", lineno)
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise InputFormatError(f"cannot parse complex entry {token!r}", lineno) from None


def _parse_matrix(tokens: list[str], dim: int, lineno: int) -> np.ndarray:
    if len(tokens) != dim * dim:
        raise InputFormatError(
            f"expected {dim * dim} matrix entries, got {len(tokens)}", lineno
        )
    vals = [_parse_complex(t, lineno) for t in tokens]
    return np.array(vals, dtype=complex).reshape(dim, dim)


def _parse_int(token: str, lineno: int, what: str = "integer") -> int:
    try:
        return int(token)
    except ValueError:
        raise InputFormatError(f"cannot parse {what} {token!r}", lineno) from None


NAMED_GATES = {"x", "y", "z", "h", "s", "i", "cnot", "cx", "cz", "swap"}


def parse_circuit(text: str) -> QuantumCircuit:
    n_qubits = None
    gates: list[Gate] = []
    for lineno, line in _content_lines(text):
        tokens = line.split()
        head = tokens[0].lower()
        if head == "qubits":
            if len(tokens) != 2:
                raise InputFormatError("usage: qubits <n>", lineno)
            n_qubits = _parse_int(tokens[1], lineno, "qubit count")
            continue
        if n_qubits is None:
            raise InputFormatError("a 'qubits <n>' line must come first", lineno)
        if head in NAMED_GATES:
            sites = [_parse_int(t, lineno, "site index") for t in tokens[1:]]
            mat = named_gate(head)
            expected = 2 if mat.shape[0] == 4 else 1
            if len(sites) != expected:
                raise InputFormatError(
                    f"gate {head} needs {expected} site(s), got {len(sites)}", lineno
                )
            _add_gate(gates, sites, mat, n_qubits, lineno)
        elif head == "rz":
            if len(tokens) != 3:
                raise InputFormatError("usage: rz <theta> <site>", lineno)
            try:
                theta = float(tokens[1])
            except ValueError:
                raise InputFormatError(f"cannot parse angle {tokens[1]!r}", lineno) from None
            site = _parse_int(tokens[2], lineno, "site index")
            _add_gate(gates, [site], named_gate("rz", theta), n_qubits, lineno)
        elif head == "matrix":
            if ":" not in tokens:
                raise InputFormatError("usage: matrix <sites...> : <entries...>", lineno)
            sep = tokens.index(":")
            sites = [_parse_int(t, lineno, "site index") for t in tokens[1:sep]]
            if len(sites) not in (1, 2):
                raise InputFormatError("explicit gates act on 1 or 2 qubits", lineno)
            mat = _parse_matrix(tokens[sep + 1 :], 2 ** len(sites), lineno)
            _add_gate(gates, sites, mat, n_qubits, lineno)
        else:
            raise InputFormatError(f"unknown statement {tokens[0]!r}", lineno)
    if n_qubits is None:
        raise InputFormatError("missing 'qubits <n>' line", 1)
    if not gates:
        raise InputFormatError("circuit has no gates", 1)
    return QuantumCircuit(n_qubits, gates)


def _add_gate(gates, sites, mat, n_qubits, lineno):
    for s in sites:
        if not 0 <= s < n_qubits:
            raise InputFormatError(f"site {s} outside 0..{n_qubits - 1}", lineno)
    try:
        gates.append(Gate(tuple(sites), mat))
    except ValueError as exc:
        raise InputFormatError(str(exc), lineno) from None


def parse_hamiltonian(text: str) -> FrustrationFreeHamiltonian:
    dims = None
    system = None
    terms = []
    pending_graph_edges: list[tuple[int, list[int]]] = []
    for lineno, line in _content_lines(text):
        tokens = line.split()
        head = tokens[0].lower()
        if head == "dims":
            dims = tuple(_parse_int(t, lineno, "dimension") for t in tokens[1:])
            if not dims:
                raise InputFormatError("usage: dims <d1> <d2> ...", lineno)
            try:
                system = SiteSystem(dims)
            except ValueError as exc:
                raise InputFormatError(str(exc), lineno) from None
            continue
        if system is None:
            raise InputFormatError("a 'dims ...' line must come first", lineno)
        if head == "vertex":
            if ":" in tokens:
                sep = tokens.index(":")
                v = _parse_int(tokens[1], lineno, "vertex")
                nbrs = [_parse_int(t, lineno, "neighbor") for t in tokens[sep + 1 :]]
            else:
                if len(tokens) != 2:
                    raise InputFormatError("usage: vertex <v> [: <neighbors...>]", lineno)
                v = _parse_int(tokens[1], lineno, "vertex")
                nbrs = []
            pending_graph_edges.append((v, nbrs))
            terms.append(("vertex", v, nbrs, lineno))
        elif head in ("star", "plaquette"):
            sites = [_parse_int(t, lineno, "site index") for t in tokens[1:]]
            if not sites:
                raise InputFormatError(f"usage: {head} <sites...>", lineno)
            terms.append((head, sites, lineno))
        elif head == "term":
            if ":" not in tokens:
                raise InputFormatError("usage: term <sites...> : <entries...>", lineno)
            sep = tokens.index(":")
            sites = [_parse_int(t, lineno, "site index") for t in tokens[1:sep]]
            if not sites:
                raise InputFormatError("term needs at least one site", lineno)
            dim = int(np.prod([_site_dim(system, s, lineno) for s in sites]))
            mat = _parse_matrix(tokens[sep + 1 :], dim, lineno)
            terms.append(("term", sites, mat, lineno))
        else:
            raise InputFormatError(f"unknown statement {tokens[0]!r}", lineno)
    if system is None:
        raise InputFormatError("missing 'dims ...' line", 1)
    if not terms:
        raise InputFormatError("no terms given", 1)

    local_terms = []
    n = system.n_sites
    # graph terms need the full edge list for their neighbor sets
    graph = None
    if pending_graph_edges:
        edges = set()
        for v, nbrs in pending_graph_edges:
            for u in nbrs:
                edges.add((min(u, v), max(u, v)))
        try:
            graph = GraphSpec(n, sorted(edges))
        except ValueError as exc:
            raise InputFormatError(str(exc), pending_graph_edges[0][0] + 1) from None
    for entry in terms:
        kind = entry[0]
        if kind == "vertex":
            _, v, nbrs, lineno = entry
            if not 0 <= v < n:
                raise InputFormatError(f"vertex {v} outside system", lineno)
            local_terms.append(graph_vertex_term(graph, v, system))
        elif kind in ("star", "plaquette"):
            _, sites, lineno = entry
            letter = "X" if kind == "star" else "Z"
            for s in sites:
                _site_dim(system, s, lineno)
            stab = pauli_string(letter * len(sites))
            h = 0.5 * (np.eye(stab.shape[0], dtype=complex) - stab)
            try:
                local_terms.append(local_operator(h, sites, system))
            except ValueError as exc:
                raise InputFormatError(str(exc), lineno) from None
        else:
            _, sites, mat, lineno = entry
            try:
                local_terms.append(local_operator(mat, sites, system))
            except ValueError as exc:
                raise InputFormatError(str(exc), lineno) from None
    try:
        return FrustrationFreeHamiltonian(system, local_terms)
    except ValueError as exc:
        raise InputFormatError(str(exc), 1) from None


def _site_dim(system: SiteSystem, site: int, lineno: int) -> int:
    if not 0 <= site < system.n_sites:
        raise InputFormatError(f"site {site} outside system", lineno)
    return system.dims[site]


def parse_mps(text: str) -> MatrixProductState:
    preset = None
    sites = None
    d = None
    bond = None
    tensors: dict[int, np.ndarray] = {}
    for lineno, line in _content_lines(text):
        tokens = line.split()
        head = tokens[0].lower()
        if head == "preset":
            if len(tokens) != 2:
                raise InputFormatError("usage: preset <name>", lineno)
            preset = tokens[1]
        elif head == "sites":
            sites = _parse_int(tokens[1], lineno, "site count")
        elif head == "d":
            d = _parse_int(tokens[1], lineno, "physical dimension")
        elif head == "bond":
            bond = _parse_int(tokens[1], lineno, "bond dimension")
        elif head == "tensor":
            if ":" not in tokens or len(tokens) < 3:
                raise InputFormatError("usage: tensor <i> : <entries...>", lineno)
            if bond is None:
                raise InputFormatError("a 'bond <D>' line must come before tensors", lineno)
            idx = _parse_int(tokens[1], lineno, "tensor index")
            sep = tokens.index(":")
            tensors[idx] = _parse_matrix(tokens[sep + 1 :], bond, lineno)
        else:
            raise InputFormatError(f"unknown statement {tokens[0]!r}", lineno)
    if sites is None:
        raise InputFormatError("missing 'sites <n>' line", 1)
    if preset is not None:
        try:
            return preset_mps(preset, sites)
        except ValueError as exc:
            raise InputFormatError(str(exc), 1) from None
    if d is None or bond is None:
        raise InputFormatError("explicit tensors need 'd' and 'bond' lines", 1)
    if sorted(tensors) != list(range(d)):
        raise InputFormatError(
            f"need tensors 0..{d - 1}, got {sorted(tensors)}", 1
        )
    arr = np.stack([tensors[i] for i in range(d)])
    return MatrixProductState(arr, sites)
