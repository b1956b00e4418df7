import math
import os
import sys
import tempfile

sys.path.insert(0, os.environ.get("PBGSIM_MODULE_DIR", "build"))

import pbgsim


AMPLIFIER = """
[device]
k_f = 5e-2
k_b = 5e-2
length = 2

[boundary]
a_pf0 = 10
"""


def test_config_round_trip():
    cfg = pbgsim.parse_config(AMPLIFIER)
    text = pbgsim.serialize_config(cfg)
    again = pbgsim.serialize_config(pbgsim.parse_config(text))
    assert again == text
    pbgsim.validate(cfg)
    assert pbgsim.get_parameter(cfg, "device.k_f.re") == 5e-2
    pbgsim.set_parameter(cfg, "device.delta_p", 3.5)
    assert pbgsim.get_parameter(cfg, "device.delta_p") == 3.5


def test_recipes_are_exposed():
    ids = list(pbgsim.figure_ids())
    assert ids == list(range(2, 13))
    cfg = pbgsim.figure_recipe(7)
    assert "fig07" in pbgsim.serialize_config(cfg)
    names = list(pbgsim.observable_names())
    assert len(names) == 32
    assert "lambda_sf_if" in names


def test_mean_field_profile():
    cfg = pbgsim.parse_config(AMPLIFIER)
    sol = pbgsim.mean_field(cfg)
    assert sol["flux_drift"] < 1e-10
    z = sol["z"]
    assert z[0] == 0.0 and abs(z[-1] - 2.0) < 1e-12
    pump = sol["a"][2]  # forward pump profile
    assert abs(pump[0] - 10.0) < 1e-12


def test_point_observables_amplifier_window():
    cfg = pbgsim.parse_config(AMPLIFIER)
    point = pbgsim.point_observables(cfg)
    assert point["status"] == 0
    values = point["values"]
    expected = 2.0 * math.exp(-4.0)
    assert abs(values["lambda_sf_if"] - expected) < 1e-6
    assert values["tw_sf"] is None  # vacuum input carries no reduced moment
    u = pbgsim.input_output(cfg)
    assert abs(u[0][0] - complex(math.cosh(2.0), 0.0)) < 1e-8


def test_run_scan_writes_outputs():
    with tempfile.TemporaryDirectory() as tmp:
        cfg = pbgsim.parse_config(
            AMPLIFIER
            + f"""
[scan]
axis1 = device.k_p.re : 0 1 3
observables = lambda_sf_if
output_dir = {tmp}
stem = smoke

[solver]
grid_points = 501
"""
        )
        csv, plot, meta = pbgsim.run_scan(cfg)
        for path in (csv, plot, meta):
            assert os.path.exists(path)
        with open(csv) as fh:
            lines = [ln for ln in fh.read().splitlines() if ln]
        assert lines[1].startswith("device.k_p.re,status,")
        assert len(lines) == 5  # stamp, header, three rows
