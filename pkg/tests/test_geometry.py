import numpy as np
import pytest

from pdpdoa import geometry_from_meters, make_geometry, make_pairs


def test_published_layouts_validate():
    assert make_geometry([0, 5, 10.5]).n == 3
    assert make_geometry([0, 2.3, 5.18]).n == 3


def test_duplicate_positions_rejected():
    with pytest.raises(ValueError):
        make_geometry([0, 5, 5])


def test_non_monotone_rejected():
    with pytest.raises(ValueError):
        make_geometry([0, 5, 4.9])


def test_too_short_rejected():
    with pytest.raises(ValueError):
        make_geometry([0])


def test_nonzero_origin_rejected():
    with pytest.raises(ValueError):
        make_geometry([1, 2, 3])


def test_two_antennas_allowed_for_signal_use():
    g = make_geometry([0, 0.8])
    ps = make_pairs(g, "all")
    assert ps.m == 1 and ps.d[0] == 0.8


def test_adjacent_pairs_fig1():
    ps = make_pairs(make_geometry([0, 2.3, 5.18]), "adjacent")
    assert ps.pairs == ((0, 1), (1, 2))
    np.testing.assert_array_equal(ps.d, [2.3, 5.18 - 2.3])


def test_all_pairs_r13():
    ps = make_pairs(make_geometry([0, 5, 10.5]), "all")
    assert ps.m == 3
    np.testing.assert_array_equal(ps.d, [5.0, 10.5, 5.5])


def test_all_pairs_r23():
    # pairwise position differences, lexicographic pair order
    ps = make_pairs(make_geometry([0, 0.4, 2.4]), "all")
    np.testing.assert_array_equal(ps.d, [0.4, 2.4, 2.0])


def test_all_pairs_count_and_order():
    rng = np.random.default_rng(3)
    for n in range(2, 7):
        pos = np.concatenate([[0.0], np.cumsum(rng.uniform(0.5, 3.0, n - 1))])
        ps = make_pairs(make_geometry(pos), "all")
        assert ps.m == n * (n - 1) // 2
        assert list(ps.pairs) == sorted(ps.pairs)


def test_spacings_rederive_bit_exact():
    rng = np.random.default_rng(4)
    pos = np.concatenate([[0.0], np.cumsum(rng.uniform(0.5, 3.0, 5))])
    g = make_geometry(pos)
    for mode in ("all", "adjacent"):
        ps = make_pairs(g, mode)
        rederived = np.array([g.positions[v] - g.positions[u] for u, v in ps.pairs])
        assert np.array_equal(rederived, ps.d)
        assert np.all(ps.d > 0)


def test_explicit_pairs():
    g = make_geometry([0, 1, 2.5, 4])
    ps = make_pairs(g, [(0, 2), (1, 3)])
    np.testing.assert_array_equal(ps.d, [2.5, 3.0])


@pytest.mark.parametrize(
    "bad", [[(0, 0)], [(2, 1)], [(0, 9)], [(-1, 1)], [], [(0, 1), (0, 1)]]
)
def test_explicit_pairs_rejected(bad):
    g = make_geometry([0, 1, 2.5, 4])
    with pytest.raises(ValueError):
        make_pairs(g, bad)


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        make_pairs(make_geometry([0, 1, 2]), "some")


def test_positions_are_immutable():
    g = make_geometry([0, 1, 2])
    with pytest.raises(ValueError):
        g.positions[0] = 5.0


def test_geometry_from_meters():
    # 10 GHz: half wavelength is ~14.99 mm; 1.5 cm spacing is ~1.0007 units
    g = geometry_from_meters([0.2, 0.215, 0.245], carrier_hz=10e9)
    assert g.positions[0] == 0.0
    half_wl = 299_792_458.0 / 10e9 / 2
    np.testing.assert_allclose(g.positions, [0.0, 0.015 / half_wl, 0.045 / half_wl])
    with pytest.raises(ValueError):
        geometry_from_meters([0.0, 0.1], carrier_hz=0.0)
