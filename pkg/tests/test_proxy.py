import random

import pytest

from kolmonet.networks import get_network
from kolmonet.proxy import (
    REFERENCE,
    RunLengthCompressor,
    ZlibCompressor,
    approx_complexity,
    approx_conditional,
    bundled_manifest,
    generate_corpus,
    ncd,
    ncd_report,
    pack,
    proxy_metrics,
    read_manifest,
)

RNG = random.Random(7)
RANDOM_10K = RNG.randbytes(10 * 1024)
PERIODIC_10K = (RNG.randbytes(2048) * 5)[: 10 * 1024]


def test_self_conditional_is_small_for_repeated_blocks():
    # measured with zlib-9: about 3.4% for a 2 KiB period
    ratio = approx_conditional(REFERENCE, PERIODIC_10K, PERIODIC_10K) / approx_complexity(REFERENCE, PERIODIC_10K)
    assert ratio <= 0.05


def test_empty_target_floors_at_zero():
    assert approx_conditional(REFERENCE, b"", b"some condition") == 0
    assert approx_conditional(REFERENCE, b"", b"") == 0


def test_random_data_is_incompressible():
    bits = approx_complexity(REFERENCE, RANDOM_10K)
    assert 8 * len(RANDOM_10K) <= bits <= 8 * len(RANDOM_10K) * 1.01


def test_ncd_of_random_data_with_itself():
    assert ncd(REFERENCE, RANDOM_10K, RANDOM_10K) < 0.1


def test_ncd_range():
    a, b = RNG.randbytes(3000), RNG.randbytes(3000)
    assert 0.9 < ncd(REFERENCE, a, b) <= 1.1


def test_size_cap_and_types():
    with pytest.raises(ValueError):
        approx_complexity(REFERENCE, b"x" * 11, cap=10)
    with pytest.raises(TypeError):
        approx_complexity(REFERENCE, "text")


def test_pack_is_unambiguous():
    assert pack(b"ab", b"c") != pack(b"a", b"bc")


def test_other_compressors_fit_the_interface():
    rle = RunLengthCompressor()
    assert rle.compressed_bits(b"aaab") == 32
    assert ZlibCompressor(1).name == "zlib-1"
    assert approx_conditional(rle, b"aaaa", b"bbbb") == 16


def _roles(net):
    data = {v: RNG.randbytes(500) for v in net.variables}
    return data, (RNG.randbytes(200), RNG.randbytes(200))


def test_private_disclosure_on_c_is_zero():
    net = get_network("c")
    strings, pair = _roles(net)
    m = proxy_metrics(net, strings, pair)
    assert m.private_disclosure == 0 and m.proxy


def test_proxy_metrics_shape():
    net = get_network("e")
    strings, pair = _roles(net)
    m = proxy_metrics(net, strings, pair)
    assert m.proxy and m.cpq > 0 and m.achieved_epsilon >= 0
    with pytest.raises(ValueError):
        proxy_metrics(net, {"x": b""}, pair)


def test_corpus_generation_is_deterministic(tmp_path):
    a = generate_corpus(tmp_path / "a", seed=3, count=10)
    b = generate_corpus(tmp_path / "b", seed=3, count=10)
    files_a = [p.read_bytes() for p, _ in read_manifest(a)]
    files_b = [p.read_bytes() for p, _ in read_manifest(b)]
    assert files_a == files_b and len(files_a) == 10


def test_bundled_corpus_matches_generator(tmp_path):
    fresh = generate_corpus(tmp_path, seed=0, count=20)
    bundled = read_manifest(bundled_manifest())
    assert [p.read_bytes() for p, _ in read_manifest(fresh)] == [p.read_bytes() for p, _ in bundled]


def test_manifest_errors(tmp_path):
    bad = tmp_path / "m.tsv"
    bad.write_text("file.bin\tv\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_manifest(bad)


def test_report_keys():
    files = [p for p, _ in read_manifest(bundled_manifest())][:4]
    rep = ncd_report(REFERENCE, files)
    assert rep["files"] == 4 and set(rep["self_ncd"]) == {f.name for f in files}
