import io
import itertools
import json
import math

import numpy as np
import pytest

from pathspace import bell
from pathspace.interferometers import RaritySpec
from pathspace.phasor import ValidationError


@pytest.mark.parametrize("p, e", [(1.0, 1.0), (0.0, -1.0), (0.5, 0.0)])
def test_correlation_from_same_prob(p, e):
    assert bell.correlation_from_same_prob(p) == e


@pytest.mark.parametrize("p", [-0.1, 1.1, math.nan])
def test_correlation_rejects_out_of_range(p):
    with pytest.raises(ValidationError):
        bell.correlation_from_same_prob(p)


def test_cos2_chsh_standard_settings():
    s = bell.chsh(bell.cos2_backend(), *bell.STANDARD_CHSH)
    assert s == pytest.approx(2 * math.sqrt(2), abs=1e-9)
    assert s > 2


def test_constant_half_gives_zero():
    assert bell.chsh(bell.constant_backend(0.5), 0.1, 0.2, 0.3, 0.4) == 0.0


def test_chsh_rejects_non_finite():
    with pytest.raises(ValidationError):
        bell.chsh(bell.cos2_backend(), 0.0, math.nan, 0.0, 0.0)


def naive_grid_max(backend, n):
    angles = [k * 2 * math.pi / n for k in range(n)]
    return max(bell.chsh(backend, *combo) for combo in itertools.product(angles, repeat=4))


@pytest.mark.parametrize("backend", [bell.toy_backend(), bell.cos2_backend(), bell.sqm_backend()])
def test_grid_max_matches_naive_enumeration(backend):
    fast, settings = bell.chsh_grid_max(backend, 8)
    assert fast == pytest.approx(naive_grid_max(backend, 8), abs=1e-12)
    assert bell.chsh(backend, *settings) == pytest.approx(fast, abs=1e-12)


def test_toy_never_exceeds_two_on_fine_grid():
    s, _ = bell.chsh_grid_max(bell.toy_backend(), 360)
    assert s <= 2 + 1e-9
    assert s == pytest.approx(2.0, abs=1e-9)


def test_maximize_finds_quantum_bound():
    s, _ = bell.chsh_maximize(bell.cos2_backend(), n_grid=12)
    assert s == pytest.approx(2 * math.sqrt(2), abs=1e-3)
    s_toy, _ = bell.chsh_maximize(bell.toy_backend(), n_grid=12)
    assert s_toy <= 2 + 1e-9


@pytest.mark.parametrize(
    "backend, expected",
    [(bell.cos2_backend(), 0.5), (bell.toy_backend(), 5 / 9), (bell.constant_backend(1.0), 1.0)],
)
def test_mermin_average(backend, expected):
    assert bell.mermin_average(backend) == pytest.approx(expected, abs=1e-9)


def test_toy_mermin_exceeds_cos2():
    assert bell.mermin_average(bell.toy_backend()) > bell.mermin_average(bell.cos2_backend())


def test_amplitude_backends_agree():
    ps = bell.path_sum_backend(RaritySpec(n_source_points=64))
    c2, sqm = bell.cos2_backend(), bell.sqm_backend()
    for a, b in np.random.default_rng(0).uniform(0, 2 * math.pi, (15, 2)):
        assert ps(a, b) == pytest.approx(c2(a, b), abs=1e-9)
        assert sqm(a, b) == pytest.approx(c2(a, b), abs=1e-9)


def test_event_backend_is_local_model():
    ev = bell.event_backend(50_000, 3)
    s = bell.chsh(ev, *bell.STANDARD_CHSH)
    assert s <= 2 + 4 * 4 * math.sqrt(1 / 50_000)
    assert ev(0.0, 0.0) == ev(0.0, 0.0) == 1.0


def test_correlation_table_csv():
    table = bell.CorrelationTable.build([bell.cos2_backend(), bell.toy_backend()], [(0.0, 0.0), (0.0, math.pi)])
    assert len(table.rows) == 4
    buf = io.StringIO()
    table.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "alpha,beta,backend,p_same,E"
    assert lines[1] == "0.0,0.0,cos2,1.0,1.0"
    assert lines[4].endswith("toy,0.0,-1.0")


def test_bell_report_json():
    buf = io.StringIO()
    bell.write_bell_json([bell.bell_report(bell.cos2_backend())], buf)
    doc = json.loads(buf.getvalue())
    assert set(doc[0]) == {"backend", "chsh_settings", "S", "mermin_avg"}
    assert doc[0]["S"] == pytest.approx(2 * math.sqrt(2))
