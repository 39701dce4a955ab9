"""Compressor-based estimates of the network quantities on real byte data.

Estimates are flagged ``proxy=True`` and never mixed with exact oracle
values. Conditional complexity uses the concatenation surrogate
``size(v + u) - size(v)``, floored at zero; sizes are in bits.
"""
from __future__ import annotations

import random
import struct
import zlib
from pathlib import Path
from typing import Mapping, Protocol, Sequence

from .networks import Metrics, Network, get_network

DEFAULT_SIZE_CAP = 1 << 20


class Compressor(Protocol):
    name: str

    def compressed_bits(self, data: bytes) -> int: ...


class ZlibCompressor:
    """DEFLATE at a fixed level; the reference compressor."""

    def __init__(self, level: int = 9):
        self.level = level
        self.name = f"zlib-{level}"

    def compressed_bits(self, data: bytes) -> int:
        return 8 * len(zlib.compress(data, self.level))


class RunLengthCompressor:
    """Byte run-length coding: (count, byte) per run of at most 255."""

    name = "rle"

    def compressed_bits(self, data: bytes) -> int:
        runs = 0
        i = 0
        while i < len(data):
            j = i
            while j < len(data) and data[j] == data[i] and j - i < 255:
                j += 1
            runs += 1
            i = j
        return 16 * runs


REFERENCE = ZlibCompressor()


def _check(data: bytes, cap: int) -> bytes:
    if not isinstance(data, (bytes, bytearray)):
        raise TypeError("proxy inputs are byte strings")
    if len(data) > cap:
        raise ValueError(f"input of {len(data)} bytes exceeds the size cap of {cap}")
    return bytes(data)


def pack(*items: bytes) -> bytes:
    """Length-prefixed concatenation, the byte analogue of tuple pairing."""
    return b"".join(struct.pack(">Q", len(it)) + it for it in items)


def approx_complexity(c: Compressor, u: bytes, cap: int = DEFAULT_SIZE_CAP) -> int:
    return c.compressed_bits(_check(u, cap))


def approx_conditional(c: Compressor, u: bytes, v: bytes, cap: int = DEFAULT_SIZE_CAP) -> int:
    u, v = _check(u, cap), _check(v, cap)
    return max(0, c.compressed_bits(v + u) - c.compressed_bits(v))


def ncd(c: Compressor, x: bytes, y: bytes, cap: int = DEFAULT_SIZE_CAP) -> float:
    x, y = _check(x, cap), _check(y, cap)
    cx, cy = c.compressed_bits(x), c.compressed_bits(y)
    return (c.compressed_bits(x + y) - min(cx, cy)) / max(cx, cy)


def proxy_metrics(net: Network | str, strings: Mapping[str, bytes], pair: tuple[bytes, bytes],
                  c: Compressor = REFERENCE, cap: int = DEFAULT_SIZE_CAP) -> Metrics:
    """Metrics-shaped estimates; disclosure about an empty group is zero."""
    net = get_network(net)
    missing = [v for v in net.variables if v not in strings]
    if missing:
        raise ValueError(f"topology {net.tag} needs {missing}")
    labels = {"p": pair[0], "q": pair[1] if net.tag != "b" else b""}
    seen = pack(*(labels[ch] for ch in net.channels))
    everything = pack(*(strings[v] for v in net.variables))
    conds = [approx_conditional(c, labels[ch], everything, cap) for ch in net.channels]
    conds += [approx_conditional(c, strings[n.output], pack(labels[n.channel], strings[n.input]), cap)
              for n in net.nodes]
    cpq = approx_complexity(c, seen, cap)
    private = 0
    if net.private:
        private = max(0, cpq - approx_conditional(c, seen, pack(*(strings[v] for v in net.private)), cap))
    return Metrics(
        achieved_epsilon=max(conds),
        cp=approx_complexity(c, labels["p"], cap),
        cq=approx_complexity(c, labels["q"], cap),
        cpq=cpq,
        total_disclosure=max(0, cpq - approx_conditional(c, seen, everything, cap)),
        private_disclosure=private,
        proxy=True,
    )


# ------------------------------------------------------------------ corpus

ROLES = ("w", "x", "y", "z", "p", "q")

_WORDS = ("network channel message sender receiver string program complexity information "
          "pair node input output secret public bound minimal length random transmission "
          "eavesdropper disclosure private total prefix condition table code key").split()


def _text(rng: random.Random, size: int) -> bytes:
    words = []
    while sum(len(w) + 1 for w in words) < size:
        words.append(rng.choice(_WORDS))
        if rng.random() < 0.08:
            words[-1] += "."
    return " ".join(words).encode()[:size]


def _mutate(rng: random.Random, data: bytes, rate: float) -> bytes:
    out = bytearray(data)
    for i in range(len(out)):
        if rng.random() < rate:
            out[i] = rng.randrange(32, 127)
    return bytes(out)


def _csv(rng: random.Random, size: int) -> bytes:
    rows = ["id,value,flag"]
    i = 0
    while sum(len(r) + 1 for r in rows) < size:
        rows.append(f"{i},{rng.gauss(0, 100):.3f},{rng.choice('ab')}")
        i += 1
    return "\n".join(rows).encode()[:size]


def _log(rng: random.Random, size: int) -> bytes:
    lines = []
    t = rng.randint(10 ** 9, 2 * 10 ** 9)
    while sum(len(x) + 1 for x in lines) < size:
        t += rng.randint(1, 90)
        lines.append(f"{t} node{rng.randint(1, 9)} {rng.choice(_WORDS)} status={rng.choice(['ok', 'retry', 'fail'])} "
                     f"bytes={rng.randint(0, 65535)}")
    return "\n".join(lines).encode()[:size]


def generate_corpus(directory, seed: int = 0, count: int = 20) -> Path:
    """Write ``count`` deterministic files and a ``manifest.tsv``; returns the manifest."""
    rng = random.Random(seed)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    base = _text(rng, 6000)
    lines = []
    for i in range(count):
        size = rng.randint(2048, 8192)
        kind = ("random", "text", "mutated", "csv", "log")[i % 5]
        if kind == "random":
            data = rng.randbytes(size)
        elif kind == "text":
            data = _text(rng, size)
        elif kind == "mutated":
            data = _mutate(rng, (base * 2)[:size], 0.05)
        elif kind == "csv":
            data = _csv(rng, size)
        else:
            data = _log(rng, size)
        name = f"{i:02d}_{kind}.bin"
        (directory / name).write_bytes(data)
        lines.append(f"{name}\t{ROLES[i % len(ROLES)]}")
    manifest = directory / "manifest.tsv"
    manifest.write_text("# path\trole\n" + "\n".join(lines) + "\n", encoding="utf-8")
    return manifest


def read_manifest(path) -> list[tuple[Path, str]]:
    path = Path(path)
    out = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2 or parts[1] not in ROLES:
            raise ValueError(f"{path}:{lineno}: expected 'path<TAB>role' with role in {ROLES}")
        out.append(((path.parent / parts[0]).resolve(), parts[1]))
    return out


def bundled_manifest() -> Path:
    return Path(__file__).parent / "data" / "corpus" / "manifest.tsv"


def ncd_report(c: Compressor, files: Sequence[Path]) -> dict:
    data = [Path(f).read_bytes() for f in files]
    self_ncd = [ncd(c, d, d) for d in data]
    asym = []
    for i in range(len(data)):
        for j in range(i + 1, len(data)):
            asym.append(abs(ncd(c, data[i], data[j]) - ncd(c, data[j], data[i])))
    return {
        "compressor": c.name,
        "files": len(data),
        "max_self_ncd": max(self_ncd, default=0.0),
        "max_asymmetry": max(asym, default=0.0),
        "self_ncd": {Path(f).name: v for f, v in zip(files, self_ncd)},
    }
