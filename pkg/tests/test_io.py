import numpy as np
import pytest

from sylvbq.io import format_field, parse_field, read_field, write_field


def test_real_roundtrip(tmp_path, rng):
    U = rng.standard_normal((4, 4)) * 1e-7
    p = tmp_path / "u.txt"
    write_field(p, U, 0.25)
    J, t, V = read_field(p)
    assert (J, t) == (3, 0.25)
    np.testing.assert_array_equal(U, V)


def test_complex_roundtrip(rng):
    U = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    U[0, 0] = 1e-5 - 3e-12j
    J, t, V = parse_field(format_field(U, 1.0))
    np.testing.assert_array_equal(U, V)


def test_layout():
    text = format_field(np.array([[1.0, 2.0], [3.0, 4.5]]), 0.5)
    assert text.splitlines() == ["# sylvbq field J=1 t=0.5", "1 2", "3 4.5"]
    text = format_field(np.array([[1 + 2j, -1.5 - 0.5j], [0j, 3j]]), 0.0)
    assert text.splitlines()[1] == "1+2i -1.5-0.5i"


@pytest.mark.parametrize("text", ["", "1 2\n3 4\n", "# sylvbq field J=2 t=0\n1 2\n3 4\n", "# sylvbq field J=0 t=0\n1ii\n"])
def test_malformed(text):
    with pytest.raises(ValueError):
        parse_field(text)


def test_non_square_rejected():
    with pytest.raises(ValueError):
        format_field(np.ones((2, 3)), 0.0)
