import hashlib
import os
import random
import struct

import pytest

from mbrr.cli import (
    HEADER_SIZE,
    ShardHeader,
    bytes_to_symbols,
    decode_shards,
    encode_file,
    file_params,
    main,
    read_shard,
    shard_filename,
    symbol_width,
    symbols_to_bytes,
    write_shard,
)
from mbrr.layout import NodeId


def sample_header(**overrides):
    fields = dict(
        m=8,
        primitive_poly=0x11D,
        n=12,
        k=7,
        u=3,
        dbar=3,
        systematic=False,
        e=1,
        g=2,
        stripe_count=10,
        payload_length=30,
        original_length=199,
    )
    fields.update(overrides)
    return ShardHeader(**fields)


# ---------------------------------------------------------------- format


def test_header_round_trip():
    h = sample_header()
    blob = h.pack()
    assert len(blob) == HEADER_SIZE == 48
    assert ShardHeader.unpack(blob) == h
    assert ShardHeader.unpack(blob + b"extra payload") == h


def test_header_rejects_garbage():
    with pytest.raises(ValueError, match="magic"):
        ShardHeader.unpack(b"NOPE" + bytes(44))
    with pytest.raises(ValueError, match="version"):
        blob = bytearray(sample_header().pack())
        blob[5] = 9
        ShardHeader.unpack(bytes(blob))
    with pytest.raises(ValueError, match="truncated"):
        ShardHeader.unpack(sample_header().pack()[:20])


def test_header_matches_ignores_node_identity():
    a = sample_header(e=0, g=0)
    b = sample_header(e=3, g=1)
    assert a.matches(b)
    assert not a.matches(sample_header(k=8))
    assert not a.matches(sample_header(systematic=True))


def test_symbol_framing_round_trip():
    assert symbol_width(8) == 1 and symbol_width(16) == 2
    data = bytes(range(256)) * 3
    assert symbols_to_bytes(bytes_to_symbols(data, 8), 8) == data
    syms16 = bytes_to_symbols(data, 16)
    assert len(syms16) == len(data) // 2
    assert syms16[0] == 0x0001  # big-endian pairs
    assert symbols_to_bytes(syms16, 16) == data
    # odd length pads one zero byte
    odd = b"\x07\x08\x09"
    assert bytes_to_symbols(odd, 16) == [0x0708, 0x0900]
    with pytest.raises(ValueError):
        bytes_to_symbols(data, 12)


def test_shard_file_round_trip(tmp_path):
    h = sample_header(stripe_count=2, payload_length=6, original_length=5)
    path = str(tmp_path / shard_filename(h.e, h.g))
    write_shard(path, h, [1, 2, 3, 250, 0, 9])
    got_h, got_syms = read_shard(path)
    assert got_h == h
    assert got_syms == [1, 2, 3, 250, 0, 9]
    assert not os.path.exists(path + ".tmp")


def test_write_shard_validates_payload_length(tmp_path):
    h = sample_header(stripe_count=2, payload_length=6)
    with pytest.raises(ValueError, match="payload"):
        write_shard(str(tmp_path / "x.mbrr"), h, [1, 2, 3])


def test_read_shard_validates_consistency(tmp_path):
    h = sample_header(stripe_count=2, payload_length=6, original_length=5)
    path = str(tmp_path / "x.mbrr")
    write_shard(path, h, [1, 2, 3, 4, 5, 6])
    blob = open(path, "rb").read()
    open(path, "wb").write(blob[:-1])  # truncate payload
    with pytest.raises(ValueError, match="payload"):
        read_shard(path)


# ---------------------------------------------------------------- params


def test_file_params_picks_byte_field():
    assert file_params(12, 7, 3, 3).field.q == 256
    assert file_params(12, 7, 3, 3, 16).field.q == 65536
    # 5 divides 255, so m=8 still covers 5-node racks
    assert file_params(15, 8, 5, 2).field.q == 256
    with pytest.raises(ValueError, match="framable"):
        file_params(14, 8, 7, 1)  # 7 divides neither 255 nor 65535
    with pytest.raises(ValueError, match="m in"):
        file_params(12, 7, 3, 3, 4)


# ---------------------------------------------------------------- encode


def test_encode_decode_round_trip_memory():
    rng = random.Random(500)
    p8 = file_params(12, 7, 3, 3)
    p16 = file_params(12, 7, 3, 3, 16)
    for p in (p8, p16):
        width = symbol_width(p.field.m)
        stripe_bytes = p.B * width
        for size in (1, 2, stripe_bytes - 1, stripe_bytes, stripe_bytes + 1, 4096):
            data = rng.randbytes(size)
            for systematic in (False, True):
                headers, shards = encode_file(data, p, systematic=systematic)
                assert headers[0].original_length == size
                loaded = {
                    NodeId(h.e, h.g): (h, syms)
                    for h, syms in zip(headers, shards)
                }
                assert decode_shards(loaded) == data
                # any k columns suffice, not just all n
                picks = dict(sorted(loaded.items())[-p.k :])
                assert decode_shards(picks) == data


def test_encode_file_refuses_empty():
    with pytest.raises(ValueError, match="empty"):
        encode_file(b"", file_params(12, 7, 3, 3))


def test_decode_shards_validates():
    p = file_params(12, 7, 3, 3)
    headers, shards = encode_file(b"hello world", p)
    loaded = {NodeId(h.e, h.g): (h, syms) for h, syms in zip(headers, shards)}
    few = dict(list(loaded.items())[: p.k - 1])
    with pytest.raises(ValueError, match="k=7"):
        decode_shards(few)


# ---------------------------------------------------------------- commands


def run_cli(capsys, *argv):
    rc = main([str(a) for a in argv])
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_cmd_params_reports_geometry(capsys):
    rc, out, err = run_cli(capsys, "params", 12, 7, 3, 3)
    assert rc == 0
    assert "alpha 3" in out and "B 20" in out
    assert "GF(2^8)" in out
    rc, out, err = run_cli(capsys, "params", 50, 44, 5, 9)
    assert rc == 0
    assert "1.2228" in out
    rc, out, err = run_cli(capsys, "params", 12, 7, 3, 1)
    assert rc == 2
    assert "dbar" in err


def test_cmd_encode_decode_repair_cycle(tmp_path, capsys):
    src = tmp_path / "input.bin"
    src.write_bytes(random.Random(501).randbytes(3000))
    shard_dir = tmp_path / "shards"
    rc, out, _ = run_cli(
        capsys, "encode", src, 12, 7, 3, 3, "--out", shard_dir
    )
    assert rc == 0
    names = sorted(os.listdir(shard_dir))
    assert len(names) == 12
    assert shard_filename(0, 0) in names

    # decode from an explicit 7-subset of shard files
    subset = [shard_dir / n for n in names[3:10]]
    dst = tmp_path / "restored.bin"
    rc, out, _ = run_cli(capsys, "decode", *subset, "--out", dst)
    assert rc == 0
    assert dst.read_bytes() == src.read_bytes()

    # erase one shard, regenerate it, compare hashes
    victim = shard_dir / shard_filename(2, 1)
    want = hashlib.sha256(victim.read_bytes()).hexdigest()
    victim.unlink()
    rc, out, _ = run_cli(capsys, "repair", shard_dir, 2, 1)
    assert rc == 0
    assert "cross_rack_symbols" in out
    got = hashlib.sha256(victim.read_bytes()).hexdigest()
    assert got == want


def test_cmd_decode_accepts_directory(tmp_path, capsys):
    src = tmp_path / "input.bin"
    src.write_bytes(b"some file contents went here")
    shard_dir = tmp_path / "shards"
    run_cli(capsys, "encode", src, 12, 7, 3, 3, "--out", shard_dir)
    dst = tmp_path / "restored.bin"
    rc, _, _ = run_cli(capsys, "decode", shard_dir, "--out", dst)
    assert rc == 0
    assert dst.read_bytes() == src.read_bytes()


def test_cmd_encode_systematic_places_raw_bytes(tmp_path, capsys):
    from mbrr.systematic import systematic_layout

    src = tmp_path / "input.bin"
    payload = random.Random(502).randbytes(2000)
    src.write_bytes(payload)
    shard_dir = tmp_path / "shards"
    rc, _, _ = run_cli(
        capsys, "encode", src, 12, 7, 3, 3, "--systematic", "--out", shard_dir
    )
    assert rc == 0
    p = file_params(12, 7, 3, 3)
    lay = systematic_layout(p)
    shards = {}
    for name in os.listdir(shard_dir):
        h, syms = read_shard(str(shard_dir / name))
        shards[NodeId(h.e, h.g)] = syms
        assert h.systematic
    out = []
    for s in range(h.stripe_count):
        for i, node in lay.data_positions:
            out.append(shards[node][s * p.alpha + i])
    assert bytes(out)[: len(payload)] == payload


def test_cmd_repair_rejects_bad_helpers(tmp_path, capsys):
    src = tmp_path / "input.bin"
    src.write_bytes(b"x" * 100)
    shard_dir = tmp_path / "shards"
    run_cli(capsys, "encode", src, 12, 7, 3, 3, "--out", shard_dir)
    (shard_dir / shard_filename(0, 0)).unlink()
    rc, _, err = run_cli(
        capsys, "repair", shard_dir, 0, 0, "--helpers", "1,2"
    )
    assert rc == 2 and "dbar" in err
    rc, _, err = run_cli(
        capsys, "repair", shard_dir, 0, 0, "--helpers", "woof"
    )
    assert rc == 2 and "comma-separated" in err


def test_cmd_decode_rejects_mixed_headers(tmp_path, capsys):
    a = tmp_path / "a.bin"
    b = tmp_path / "b.bin"
    a.write_bytes(b"first file")
    b.write_bytes(b"second file, different length!")
    run_cli(capsys, "encode", a, 12, 7, 3, 3, "--out", tmp_path / "sa")
    run_cli(capsys, "encode", b, 12, 7, 3, 3, "--out", tmp_path / "sb")
    mixed = [tmp_path / "sa" / shard_filename(0, 0)] + [
        tmp_path / "sb" / shard_filename(e, g)
        for e, g in [(0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 0)]
    ]
    rc, _, err = run_cli(capsys, "decode", *mixed, "--out", tmp_path / "out.bin")
    assert rc == 2
    assert "disagrees" in err


def test_cmd_decode_rejects_duplicate_nodes(tmp_path, capsys):
    src = tmp_path / "input.bin"
    src.write_bytes(b"duplicate shard test")
    shard_dir = tmp_path / "shards"
    run_cli(capsys, "encode", src, 12, 7, 3, 3, "--out", shard_dir)
    twice = [shard_dir / shard_filename(0, 0)] * 2 + [
        shard_dir / shard_filename(e, g)
        for e, g in [(0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]
    ]
    rc, _, err = run_cli(capsys, "decode", *twice, "--out", tmp_path / "o.bin")
    assert rc == 2 and "duplicate" in err


def test_shards_are_bit_reproducible(tmp_path, capsys):
    src = tmp_path / "input.bin"
    src.write_bytes(random.Random(503).randbytes(997))
    d1, d2 = tmp_path / "s1", tmp_path / "s2"
    run_cli(capsys, "encode", src, 12, 7, 3, 3, "--out", d1)
    run_cli(capsys, "encode", src, 12, 7, 3, 3, "--out", d2)
    for name in os.listdir(d1):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_empty_input_is_an_error(tmp_path, capsys):
    src = tmp_path / "empty.bin"
    src.write_bytes(b"")
    rc, _, err = run_cli(capsys, "encode", src, 12, 7, 3, 3)
    assert rc == 2
    assert "empty" in err


# ---------------------------------------------------------------- simulate


def test_simulate_is_deterministic(tmp_path, capsys):
    script = tmp_path / "scenario.txt"
    script.write_text(
        "params 12 7 3 3\n"
        "seed 9\n"
        "store 2\n"
        "fail 0 1\n"
        "repair 0 1\n"
        "read\n"
    )
    rc1, out1, _ = run_cli(capsys, "simulate", script)
    rc2, out2, _ = run_cli(capsys, "simulate", script)
    assert rc1 == rc2 == 0
    assert out1 == out2
    assert "repair node=(0,1) helpers=1,2,3 cross_rack=6 per_stripe=3" in out1
    assert "read stripes=2 verified ok" in out1


def test_simulate_reports_insufficient_survivors(tmp_path, capsys):
    script = tmp_path / "overload.txt"
    script.write_text(
        "params 12 7 3 3\n"
        "seed 1\n"
        "store 1\n"
        + "".join(f"fail {e} {g}\n" for e, g in [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)])
        + "read\n"
    )
    rc, out, _ = run_cli(capsys, "simulate", script)
    assert rc == 0
    assert "read error" in out
    assert "k=7" in out


def test_simulate_systematic_round_trip(tmp_path, capsys):
    script = tmp_path / "syst.txt"
    script.write_text(
        "params 12 7 3 3\n"
        "systematic on\n"
        "seed 3\n"
        "store 2\n"
        "fail 0 2\n"
        "read\n"
        "repair 0 2\n"
        "read\n"
    )
    rc, out, _ = run_cli(capsys, "simulate", script)
    assert rc == 0
    assert out.count("verified ok") == 2


def test_simulate_parse_errors(tmp_path, capsys):
    script = tmp_path / "bad.txt"
    script.write_text("store 1\n")
    rc, _, err = run_cli(capsys, "simulate", script)
    assert rc == 2 and "params must come first" in err
    script.write_text("params 12 7 3 3\nstore 1\nwobble\n")
    rc, _, err = run_cli(capsys, "simulate", script)
    assert rc == 2 and "unknown statement" in err


# ---------------------------------------------------------------- selftest


def test_selftest_passes(capsys):
    rc, out, _ = run_cli(capsys, "selftest")
    assert rc == 0
    assert "5/5 suites passed" in out
    assert "FAIL" not in out
