"""sepfactory/1 file formats: round trips, validation, digests."""

import json

import numpy as np
import pytest

from sepfactory import (
    Prng,
    example1_state,
    extract_ensemble,
    maximally_entangled,
    random_semi_ssppt,
)
from sepfactory import fileio
from sepfactory.errors import FormatError

from conftest import hermitize


def test_state_round_trip_bit_exact(tmp_path):
    rho, _ = random_semi_ssppt(2, 3, seed=1)
    p1 = str(tmp_path / "a.json")
    p2 = str(tmp_path / "b.json")
    fileio.save_state(p1, rho, metadata={"kind": "random_ssppt", "seed": 1})
    loaded, meta = fileio.load_state(p1)
    assert np.array_equal(loaded.matrix, rho.matrix)
    assert meta["seed"] == 1
    fileio.save_state(p2, loaded, metadata=meta)
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_seventeen_digit_floats(tmp_path):
    m = np.array([[1.0 / 3.0 + 0j]])
    path = str(tmp_path / "t.json")
    fileio.save_matrix(path, m)
    text = (tmp_path / "t.json").read_text()
    assert "0.33333333333333331" in text
    loaded, _ = fileio.load_matrix(path)
    assert np.array_equal(loaded, m)


def test_entangled_control_round_trip(tmp_path):
    rho = maximally_entangled(3)
    path = str(tmp_path / "phi.json")
    fileio.save_state(path, rho)
    loaded, _ = fileio.load_state(path)
    assert np.array_equal(loaded.matrix, rho.matrix)


def test_matrix_round_trip(tmp_path):
    m = hermitize(Prng(2).complex_matrix(3, 3))
    path = str(tmp_path / "m.json")
    fileio.save_matrix(path, m, metadata={"description": "test"})
    back, meta = fileio.load_matrix(path)
    assert np.array_equal(back, m)
    assert meta["description"] == "test"


def test_certificate_round_trip(tmp_path):
    _, cert = example1_state(3, 2, seed=9)
    path = str(tmp_path / "c.json")
    fileio.save_certificate(path, cert)
    back, _ = fileio.load_certificate(path)
    assert back.dim_a == cert.dim_a and back.dim_b == cert.dim_b
    for k in range(cert.dim_a):
        assert np.array_equal(back.x_ops[k], cert.x_ops[k])
    assert set(back.s_ops) == set(cert.s_ops)
    for key in cert.s_ops:
        assert np.array_equal(back.s_ops[key], cert.s_ops[key])
    assert back.row_norms == cert.row_norms


def test_ensemble_round_trip(tmp_path):
    _, cert = random_semi_ssppt(2, 2, seed=3)
    ens = extract_ensemble(cert)
    path = str(tmp_path / "e.json")
    fileio.save_ensemble(path, ens)
    back, _ = fileio.load_ensemble(path)
    assert len(back.terms) == len(ens.terms)
    for t1, t2 in zip(back.terms, ens.terms):
        assert t1.weight == t2.weight
        assert np.array_equal(t1.ket_a, t2.ket_a)
        assert np.array_equal(t1.ket_b, t2.ket_b)


def test_load_document_dispatch(tmp_path):
    rho, cert = random_semi_ssppt(2, 2, seed=4)
    ens = extract_ensemble(cert)
    paths = {
        "state": str(tmp_path / "s.json"),
        "matrix": str(tmp_path / "m.json"),
        "certificate": str(tmp_path / "c.json"),
        "ensemble": str(tmp_path / "e.json"),
    }
    fileio.save_state(paths["state"], rho)
    fileio.save_matrix(paths["matrix"], np.eye(2, dtype=complex))
    fileio.save_certificate(paths["certificate"], cert)
    fileio.save_ensemble(paths["ensemble"], ens)
    for kind, path in paths.items():
        got_kind, _, _ = fileio.load_document(path)
        assert got_kind == kind


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(FormatError):
        fileio.load_state(str(path))


def test_truncated_file(tmp_path):
    rho, _ = random_semi_ssppt(2, 2, seed=5)
    path = tmp_path / "t.json"
    fileio.save_state(str(path), rho)
    text = path.read_text()
    path.write_text(text[: len(text) // 2])
    with pytest.raises(FormatError):
        fileio.load_state(str(path))


def test_wrong_schema_version(tmp_path):
    path = tmp_path / "v.json"
    path.write_text(json.dumps({"schema_version": "sepfactory/2", "dims": [1, 1],
                                "entries": [[[1.0, 0.0]]]}))
    with pytest.raises(FormatError):
        fileio.load_state(str(path))


def test_bad_dims(tmp_path):
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"schema_version": "sepfactory/1",
                                "dims": [2, 0],
                                "entries": [[[1.0, 0.0]]]}))
    with pytest.raises(FormatError):
        fileio.load_state(str(path))


def test_shape_mismatch(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"schema_version": "sepfactory/1",
                                "dims": [2, 2],
                                "entries": [[[1.0, 0.0]]]}))
    with pytest.raises(FormatError):
        fileio.load_state(str(path))


def test_ragged_entries(tmp_path):
    path = tmp_path / "r.json"
    path.write_text(json.dumps({
        "schema_version": "sepfactory/1",
        "dims": [2],
        "entries": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0]]],
    }))
    with pytest.raises(FormatError):
        fileio.load_matrix(str(path))


def test_non_finite_entry(tmp_path):
    path = tmp_path / "n.json"
    path.write_text(
        '{"schema_version": "sepfactory/1", "dims": [1], '
        '"entries": [[[Infinity, 0.0]]]}'
    )
    with pytest.raises(FormatError):
        fileio.load_matrix(str(path))


def test_bad_pair_structure(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({
        "schema_version": "sepfactory/1",
        "dims": [1],
        "entries": [[[1.0, 0.0, 2.0]]],
    }))
    with pytest.raises(FormatError):
        fileio.load_matrix(str(path))


def test_digest_changes_with_content(tmp_path):
    rho, _ = random_semi_ssppt(2, 2, seed=6)
    p1 = str(tmp_path / "x.json")
    p2 = str(tmp_path / "y.json")
    fileio.save_state(p1, rho)
    fileio.save_state(p2, rho, metadata={"seed": 6})
    assert fileio.file_digest(p1) != fileio.file_digest(p2)
    assert fileio.file_digest(p1) == fileio.file_digest(p1)
