"""Feature, label, edge-list and result-document file formats.

Binary features: 8-byte magic ``GRNDFEAT``, then little-endian uint64 ``n`` and
``d``, then ``n*d`` little-endian float64 values in row-major order.
"""

import json
import struct

import numpy as np

from grande.errors import ParseError

MAGIC = b"GRNDFEAT"
_HEADER = struct.Struct("<8sQQ")


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def _csv_rows(path):
    with open(path, encoding="utf-8") as fh:
        lines = [(no, line.strip()) for no, line in enumerate(fh, start=1)]
    lines = [(no, line) for no, line in lines if line]
    if lines and not _is_number(lines[0][1].split(",")[0].strip()):
        lines = lines[1:]  # header row
    return [(no, [f.strip() for f in line.split(",")]) for no, line in lines]


def _require_nodes(n, path):
    if n < 2:
        raise ParseError(f"{path}: feature matrix has {n} rows; at least 2 are required")


def read_features_binary(path):
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise ParseError(f"{path}: truncated header ({len(blob)} of {_HEADER.size} bytes)")
    magic, n, d = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ParseError(f"{path}: bad magic {magic!r} at byte 0")
    _require_nodes(n, path)
    if d < 1:
        raise ParseError(f"{path}: feature dimension is 0 (byte 16)")
    need = _HEADER.size + 8 * n * d
    if len(blob) < need:
        raise ParseError(f"{path}: truncated payload, expected {need} bytes, file ends at byte {len(blob)}")
    if len(blob) > need:
        raise ParseError(f"{path}: {len(blob) - need} trailing bytes after byte {need}")
    x = np.frombuffer(blob, dtype="<f8", count=n * d, offset=_HEADER.size)
    return x.reshape(n, d).astype(np.float64)


def write_features_binary(path, x):
    x = np.ascontiguousarray(x, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, x.shape[0], x.shape[1]))
        fh.write(x.tobytes())


def read_features_csv(path):
    rows = []
    width = None
    for no, fields in _csv_rows(path):
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise ParseError(f"{path}:{no}: expected {width} columns, found {len(fields)}")
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            raise ParseError(f"{path}:{no}: non-numeric field") from None
    _require_nodes(len(rows), path)
    x = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ParseError(f"{path}: non-finite feature value")
    return x


def write_features_csv(path, x):
    np.savetxt(path, np.asarray(x, dtype=np.float64), delimiter=",", fmt="%.17g")


def load_features(path):
    with open(path, "rb") as fh:
        head = fh.read(len(MAGIC))
    if head == MAGIC:
        return read_features_binary(path)
    return read_features_csv(path)


def load_labels(path):
    """Read ``node_index,class_index`` lines into a dense class sequence."""
    seen = {}
    for no, fields in _csv_rows(path):
        if len(fields) != 2:
            raise ParseError(f"{path}:{no}: expected 'node,class', found {len(fields)} fields")
        try:
            node, cls = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(f"{path}:{no}: non-integer field") from None
        if node < 0 or cls < 0:
            raise ParseError(f"{path}:{no}: negative index")
        if node in seen:
            raise ParseError(f"{path}:{no}: duplicate entry for node {node}")
        seen[node] = cls
    n = len(seen)
    if n == 0:
        raise ParseError(f"{path}: no labels")
    missing = sorted(set(range(n)) - seen.keys())
    if missing:
        raise ParseError(f"{path}: node {missing[0]} has no label (nodes must cover 0..n-1)")
    labels = np.array([seen[i] for i in range(n)], dtype=np.int64)
    absent = sorted(set(range(labels.max() + 1)) - set(labels.tolist()))
    if absent:
        raise ParseError(f"{path}: class indices not contiguous, class {absent[0]} unused")
    return labels


def write_labels(path, labels):
    with open(path, "w", encoding="utf-8") as fh:
        for i, c in enumerate(np.asarray(labels).tolist()):
            fh.write(f"{i},{c}\n")


def write_edge_list(path, graph):
    with open(path, "w", encoding="utf-8") as fh:
        for i, j in graph.edges.tolist():
            fh.write(f"{i} {j}\n")


def read_edge_list(path):
    edges = []
    with open(path, encoding="utf-8") as fh:
        for no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"{path}:{no}: expected 'i j'")
            edges.append((int(parts[0]), int(parts[1])))
    return np.array(edges, dtype=np.int64).reshape(-1, 2)


def dump_result(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_result(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_result(doc))


def read_result(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: result document must be a single object")
    return doc
