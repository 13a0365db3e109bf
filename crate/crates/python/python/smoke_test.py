"""Smoke test for the extension module. Build it first with `maturin develop`."""

import motslab_py as m


def test_catalog():
    code, rows = m.run("catalog")
    assert code == 0
    names = [r["name"] for r in rows]
    assert "schwarzschild_isotropic" in names


def test_horizon_energy():
    e = m.hawking_energy("schwarzschild-iso:m=1", "sphere:r=0.5", "16x32")
    assert abs(e - 1.0) < 1e-6


def test_vacuum_constraints():
    mu, j = m.energy_momentum("schwarzschild-iso:m=1", [0.7, 0.2, -0.4])
    assert abs(mu) < 1e-8 and abs(j) < 1e-8


def test_eigen_and_audit():
    opts = {"data": "schwarzschild-iso:m=1", "surface": "sphere:r=0.5", "grid": "24x48", "operator": "Ls"}
    code, rows = m.run("eigen", opts)
    assert code == 0
    assert abs(rows[0]["lambda1"] - 0.25) < 2.5e-3

    code, rows = m.run("audit", {"theorem": "index", "genus": 0, "boundary": 10, "index": 1})
    assert code == 1
    assert rows[0]["verdict"] == "Violated"


def test_bad_key():
    try:
        m.run("surface", {"no_such_key": 1})
    except ValueError:
        return
    raise AssertionError("expected ValueError")


if __name__ == "__main__":
    for name, f in sorted(globals().items()):
        if name.startswith("test_") and callable(f):
            f()
            print(f"{name}: ok")
    print("theorems:", ", ".join(m.THEOREM_IDS))
